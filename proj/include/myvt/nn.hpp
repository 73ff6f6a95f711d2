#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "myvt/errors.hpp"
#include "myvt/rng.hpp"

namespace myvt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Codes are part of the checkpoint format; do not renumber.
enum class Activation : std::uint8_t { Identity = 0, Relu = 1, Tanh = 2, Sigmoid = 3 };

Activation activation_from_string(const std::string& name);
std::string to_string(Activation act);

struct DenseLayer {
  Mat weight;  // out x in
  Vec bias;    // out
  Activation act = Activation::Identity;
};

/// Per-layer activations cached by a forward pass. Samples are columns.
struct Tape {
  std::vector<Mat> inputs;   // input to layer k
  std::vector<Mat> outputs;  // activated output of layer k
};

/// Gradients shaped like the parameters of an Mlp.
struct MlpGrads {
  std::vector<Mat> weight;
  std::vector<Vec> bias;

  MlpGrads& operator+=(const MlpGrads& other);
  MlpGrads& operator*=(double s);
  double squared_norm() const;
};

/// Dense feed-forward network. Batched calls take one sample per column.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<DenseLayer> layers);

  /// Weights ~ Normal(0, scale^2 / fan_in), zero biases.
  static Mlp init(std::span<const int> dims, std::span<const Activation> acts, Rng& rng,
                  double scale = 1.0);

  Eigen::Index in_dim() const { return layers_.front().weight.cols(); }
  Eigen::Index out_dim() const { return layers_.back().weight.rows(); }
  std::size_t depth() const { return layers_.size(); }
  std::size_t parameter_count() const;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Forward pass over a batch; fills `tape` when given. Throws NumericalError on
  /// non-finite output.
  Mat forward(const Mat& xs, Tape* tape = nullptr) const;
  Vec forward(const Vec& x) const;

  MlpGrads zero_grads() const;
  bool all_finite() const;
  double max_abs_parameter() const;

 private:
  std::vector<DenseLayer> layers_;
};

struct Backward {
  MlpGrads params;  // summed over the batch
  Mat dx;           // per-sample input gradients
};

/// Reverse pass: gradients of sum_j <dy_j, net(x_j)> with respect to the
/// parameters and to each input column.
Backward mlp_backward(const Mlp& net, const Tape& tape, const Mat& dy);

/// p <- p - eta * g
void sgd_step(Mlp& net, const MlpGrads& grads, double eta);

struct AdamState {
  MlpGrads first;
  MlpGrads second;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_net(const Mlp& net);
};

/// Bias-corrected Adam descent step.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double eta);

enum class OptimizerKind { Sgd, Adam };

OptimizerKind optimizer_from_string(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Descent optimizer bound to one network's parameter shapes.
class Optimizer {
 public:
  Optimizer() = default;
  Optimizer(OptimizerKind kind, const Mlp& net);

  void descend(Mlp& net, const MlpGrads& grads, double eta);
  OptimizerKind kind() const { return kind_; }

 private:
  OptimizerKind kind_ = OptimizerKind::Sgd;
  AdamState adam_;
};

/// Checkpoint file layout (all integers and floats little-endian):
///
///   offset 0   8 bytes   magic "MYVTMLP\0"
///          8   u32       format version (1)
///         12   u32       layer count L
///         16   u32[L+1]  layer widths, input first
///              u8[L]     activation codes (see Activation)
///              f64[...]  per layer: weight row-major (out x in), then bias
void save_checkpoint(const Mlp& net, const std::string& path);
Mlp load_checkpoint(const std::string& path);

}  // namespace myvt
