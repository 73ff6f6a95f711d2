#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "myvt/data.hpp"
#include "myvt/divergence.hpp"
#include "myvt/nn.hpp"
#include "myvt/prox.hpp"
#include "myvt/rng.hpp"

namespace myvt {

enum class Method { MYVT, VT };

Method method_from_string(const std::string& name);
std::string to_string(Method m);

struct TrainConfig {
  Method method = Method::MYVT;
  DivergenceKind divergence = DivergenceKind::KL;
  Regularizer regularizer;
  double alpha = 0.1;
  double lambda = 1e-4;
  double eta_particle = 1e-4;
  double eta_generator = 1e-5;
  double eta_critic = 1e-3;
  int iterations = 2000;   // K
  int inner_steps = 5;     // T
  int critic_steps = 2;    // T'
  int batch_size = 100;    // m
  int n_particles = 500;   // VT only
  int noise_dim = 100;
  std::uint64_t seed = 0;
  OptimizerKind optimizer = OptimizerKind::Sgd;

  // Generator V: noise_dim -> hidden... -> d, identity output layer.
  std::vector<int> generator_hidden = {100, 100, 100};
  Activation generator_activation = Activation::Relu;
  // Critic: d -> hidden... -> 1; sigmoid output for JS, identity for KL.
  std::vector<int> critic_hidden = {100};
  Activation critic_activation = Activation::Relu;
  double init_scale = 1.0;
  double clamp_eps = 1e-5;

  void validate() const;
};

/// VT particles, one per column (d x n_particles).
struct ParticleSet {
  Mat particles;
};

struct TrainState {
  Mlp generator;  // V(., theta); unused by VT
  DualCritic critic;
  Optimizer generator_optimizer;
  Optimizer critic_optimizer;
  Rng rng;
  ParticleSet particles;  // VT only
  long iteration = 0;
};

/// Randomly initialized generator, critic and (for VT) standard-normal particles.
TrainState init_state(const TrainConfig& config, int dim);

struct MetricsRow {
  long iteration = 0;
  double mse = 0.0;
  double avg_l1 = 0.0;
  double avg_tv = 0.0;
  double dual_objective = 0.0;
  double wall_ms = 0.0;
};

/// Column-batch form of the particle direction
/// grad_x h(x) + (alpha / lambda) (x - prox^lambda_g(x)).
/// The regularizer term is skipped entirely when alpha is zero.
Mat particle_delta(const DualCritic& critic, const Regularizer& g, const Mat& xs, double alpha,
                   double lambda);
Vec particle_delta(const DualCritic& critic, const Regularizer& g, const Vec& x, double alpha,
                   double lambda);

/// VT transport direction grad_x h(x) per column.
Mat transport_direction(const DualCritic& critic, const Mat& xs);

/// Mini-batch of `m` target rows drawn uniformly with replacement, returned as columns.
Mat sample_target_batch(const Mat& examples, int m, Rng& rng);

/// mse = mean ||x - z||^2 / d; avg_l1 and avg_tv are batch means of the
/// respective regularizer values. Samples are columns.
MetricsRow evaluate_metrics(const Mat& samples, const Vec& truth, const Regularizer& g_l1,
                            const Regularizer& g_tv);

/// TV regularizer used for the avg_tv metric: the configured one when it is a
/// TV kind, TV1D otherwise.
Regularizer metric_tv(const TrainConfig& config);

/// One outer iteration of the primal-dual generator loop. Returns metrics
/// computed on the final particles x^(T).
MetricsRow myvt_iteration(TrainState& state, const TrainConfig& config, const Dataset& target);

/// One VT iteration: critic refit on the particle set, then x <- x - eta grad_x h(x).
MetricsRow vt_iteration(TrainState& state, const TrainConfig& config, const Dataset& target);

/// Dual-objective estimate plus alpha * mean envelope value over `n_eval` fresh
/// generator samples. Draws all randomness from `eval_rng`.
double smoothed_objective_estimate(const TrainState& state, const TrainConfig& config,
                                   const Dataset& target, int n_eval, Rng& eval_rng);

/// A NaN or infinity stopped training.
class TrainingAborted : public std::runtime_error {
 public:
  TrainingAborted(const std::string& what, long iteration, std::string last_checkpoint)
      : std::runtime_error(what), iteration_(iteration), last_checkpoint_(std::move(last_checkpoint)) {}
  long iteration() const { return iteration_; }
  const std::string& last_checkpoint() const { return last_checkpoint_; }

 private:
  long iteration_;
  std::string last_checkpoint_;
};

struct RunOptions {
  bool record_wall_time = true;
  int checkpoint_interval = 0;    // 0 disables periodic checkpoints
  std::string checkpoint_prefix;  // empty disables checkpoints
  std::function<void(const MetricsRow&, const TrainState&)> on_iteration;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  TrainState state;
  std::string last_checkpoint;
};

/// Runs config.iterations iterations of the configured method. Throws
/// TrainingAborted on numerical failure.
RunResult run_training(const TrainConfig& config, const Dataset& target, const RunOptions& options = {});

/// Writes <prefix>.generator.ckpt and <prefix>.critic.ckpt; returns the prefix.
std::string write_checkpoint(const TrainState& state, const std::string& prefix);

/// Metrics CSV: header `iter,mse,avg_l1,avg_tv,dual_obj,wall_ms`, LF line endings.
void write_metrics_header(std::ostream& os);
void write_metrics_row(std::ostream& os, const MetricsRow& row);

}  // namespace myvt
