#include "myvt/nn.hpp"

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace myvt {

Activation activation_from_string(const std::string& name) {
  if (name == "identity" || name == "linear") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

namespace {

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

void activate(Mat& m, Activation act) {
  switch (act) {
    case Activation::Identity: break;
    case Activation::Relu: m = m.cwiseMax(0.0); break;
    case Activation::Tanh: m = m.array().tanh().matrix(); break;
    case Activation::Sigmoid: m = m.unaryExpr(&sigmoid); break;
  }
}

// Derivative of the activation expressed through its output.
Mat activation_slope(const Mat& out, Activation act) {
  switch (act) {
    case Activation::Identity: return Mat::Ones(out.rows(), out.cols());
    case Activation::Relu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::Tanh: return (1.0 - out.array().square()).matrix();
    case Activation::Sigmoid: return (out.array() * (1.0 - out.array())).matrix();
  }
  return Mat();
}

}  // namespace

MlpGrads& MlpGrads::operator+=(const MlpGrads& other) {
  for (std::size_t k = 0; k < weight.size(); ++k) {
    weight[k] += other.weight[k];
    bias[k] += other.bias[k];
  }
  return *this;
}

MlpGrads& MlpGrads::operator*=(double s) {
  for (std::size_t k = 0; k < weight.size(); ++k) {
    weight[k] *= s;
    bias[k] *= s;
  }
  return *this;
}

double MlpGrads::squared_norm() const {
  double total = 0.0;
  for (std::size_t k = 0; k < weight.size(); ++k)
    total += weight[k].squaredNorm() + bias[k].squaredNorm();
  return total;
}

Mlp::Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("network needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.bias.size() != l.weight.rows()) throw ShapeError("bias length does not match weight rows");
    if (k > 0 && l.weight.cols() != layers_[k - 1].weight.rows())
      throw ShapeError("layer " + std::to_string(k) + " input width does not chain");
  }
}

Mlp Mlp::init(std::span<const int> dims, std::span<const Activation> acts, Rng& rng, double scale) {
  if (dims.size() < 2) throw ShapeError("network needs at least input and output widths");
  if (acts.size() != dims.size() - 1)
    throw ShapeError("expected " + std::to_string(dims.size() - 1) + " activations, got " +
                     std::to_string(acts.size()));
  std::vector<DenseLayer> layers;
  for (std::size_t k = 0; k + 1 < dims.size(); ++k) {
    if (dims[k] < 1 || dims[k + 1] < 1) throw ShapeError("layer widths must be positive");
    DenseLayer layer;
    const double sd = scale / std::sqrt(static_cast<double>(dims[k]));
    layer.weight = rng.normal_matrix(dims[k + 1], dims[k]) * sd;
    layer.bias = Vec::Zero(dims[k + 1]);
    layer.act = acts[k];
    layers.push_back(std::move(layer));
  }
  return Mlp(std::move(layers));
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

Mat Mlp::forward(const Mat& xs, Tape* tape) const {
  if (xs.rows() != in_dim())
    throw ShapeError("network expects input width " + std::to_string(in_dim()) + ", got " +
                     std::to_string(xs.rows()));
  if (tape != nullptr) {
    tape->inputs.clear();
    tape->outputs.clear();
  }
  Mat h = xs;
  for (const auto& layer : layers_) {
    Mat next = layer.weight * h;
    next.colwise() += layer.bias;
    activate(next, layer.act);
    if (tape != nullptr) {
      tape->inputs.push_back(std::move(h));
      tape->outputs.push_back(next);
    }
    h = std::move(next);
  }
  if (!h.allFinite()) throw NumericalError("non-finite network output in forward pass");
  return h;
}

Vec Mlp::forward(const Vec& x) const {
  return forward(Mat(x), nullptr).col(0);
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads g;
  for (const auto& l : layers_) {
    g.weight.push_back(Mat::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vec::Zero(l.bias.size()));
  }
  return g;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers_)
    if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
  return true;
}

double Mlp::max_abs_parameter() const {
  double m = 0.0;
  for (const auto& l : layers_) {
    m = std::max(m, l.weight.cwiseAbs().maxCoeff());
    m = std::max(m, l.bias.size() > 0 ? l.bias.cwiseAbs().maxCoeff() : 0.0);
  }
  return m;
}

Backward mlp_backward(const Mlp& net, const Tape& tape, const Mat& dy) {
  const auto& layers = net.layers();
  if (tape.inputs.size() != layers.size() || tape.outputs.size() != layers.size())
    throw ShapeError("tape does not belong to this network");
  if (dy.rows() != net.out_dim() || dy.cols() != tape.outputs.back().cols())
    throw ShapeError("output gradient shape does not match the forward batch");

  Backward result;
  result.params.weight.resize(layers.size());
  result.params.bias.resize(layers.size());
  Mat upstream = dy;
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Mat delta = upstream.cwiseProduct(activation_slope(tape.outputs[i], layers[i].act));
    result.params.weight[i] = delta * tape.inputs[i].transpose();
    result.params.bias[i] = delta.rowwise().sum();
    upstream = layers[i].weight.transpose() * delta;
  }
  result.dx = std::move(upstream);
  return result;
}

namespace {

void check_same_shape(const Mlp& net, const MlpGrads& grads) {
  const auto& layers = net.layers();
  if (grads.weight.size() != layers.size() || grads.bias.size() != layers.size())
    throw ShapeError("gradient layer count does not match network");
  for (std::size_t k = 0; k < layers.size(); ++k) {
    if (grads.weight[k].rows() != layers[k].weight.rows() ||
        grads.weight[k].cols() != layers[k].weight.cols() ||
        grads.bias[k].size() != layers[k].bias.size())
      throw ShapeError("gradient shape mismatch at layer " + std::to_string(k));
  }
}

void require_finite(const Mlp& net) {
  if (!net.all_finite()) throw NumericalError("non-finite parameter after optimizer step");
}

}  // namespace

void sgd_step(Mlp& net, const MlpGrads& grads, double eta) {
  check_same_shape(net, grads);
  auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    layers[k].weight -= eta * grads.weight[k];
    layers[k].bias -= eta * grads.bias[k];
  }
  require_finite(net);
}

AdamState AdamState::for_net(const Mlp& net) {
  AdamState s;
  s.first = net.zero_grads();
  s.second = net.zero_grads();
  return s;
}

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state, double eta) {
  check_same_shape(net, grads);
  if (state.first.weight.size() != grads.weight.size()) state = AdamState::for_net(net);
  ++state.step;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseProduct(g);
    param.array() -= eta * (m.array() / c1) / ((v.array() / c2).sqrt() + state.eps);
  };
  auto& layers = net.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    update(layers[k].weight, state.first.weight[k], state.second.weight[k], grads.weight[k]);
    update(layers[k].bias, state.first.bias[k], state.second.bias[k], grads.bias[k]);
  }
  require_finite(net);
}

OptimizerKind optimizer_from_string(const std::string& name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw std::invalid_argument("unknown optimizer '" + name + "' (expected sgd or adam)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Sgd ? "sgd" : "adam"; }

Optimizer::Optimizer(OptimizerKind kind, const Mlp& net) : kind_(kind) {
  if (kind_ == OptimizerKind::Adam) adam_ = AdamState::for_net(net);
}

void Optimizer::descend(Mlp& net, const MlpGrads& grads, double eta) {
  if (kind_ == OptimizerKind::Sgd)
    sgd_step(net, grads, eta);
  else
    adam_step(net, grads, adam_, eta);
}

// ---- checkpoint I/O ----

namespace {

constexpr std::array<char, 8> kMagic = {'M', 'Y', 'V', 'T', 'M', 'L', 'P', '\0'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) os.put(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::ostream& os, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  for (int i = 0; i < 8; ++i) os.put(static_cast<char>((bits >> (8 * i)) & 0xFFu));
}

std::uint64_t get_bytes(std::istream& is, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) {
    const int c = is.get();
    if (c == std::char_traits<char>::eof()) throw std::runtime_error("truncated checkpoint");
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

double get_f64(std::istream& is) {
  const std::uint64_t bits = get_bytes(is, 8);
  double d;
  std::memcpy(&d, &bits, sizeof d);
  return d;
}

}  // namespace

void save_checkpoint(const Mlp& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  const auto& layers = net.layers();
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kVersion);
  put_u32(os, static_cast<std::uint32_t>(layers.size()));
  put_u32(os, static_cast<std::uint32_t>(net.in_dim()));
  for (const auto& l : layers) put_u32(os, static_cast<std::uint32_t>(l.weight.rows()));
  for (const auto& l : layers) os.put(static_cast<char>(l.act));
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) put_f64(os, l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) put_f64(os, l.bias[r]);
  }
  if (!os) throw std::runtime_error("failed writing checkpoint: " + path);
}

Mlp load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  std::array<char, 8> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("not a network checkpoint: " + path);
  const auto version = static_cast<std::uint32_t>(get_bytes(is, 4));
  if (version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  const auto count = static_cast<std::uint32_t>(get_bytes(is, 4));
  if (count == 0 || count > 4096) throw std::runtime_error("implausible layer count in checkpoint");
  std::vector<Eigen::Index> dims(count + 1);
  for (auto& d : dims) d = static_cast<Eigen::Index>(get_bytes(is, 4));
  std::vector<Activation> acts(count);
  for (auto& a : acts) {
    const auto code = get_bytes(is, 1);
    if (code > 3) throw std::runtime_error("unknown activation code in checkpoint");
    a = static_cast<Activation>(code);
  }
  std::vector<DenseLayer> layers(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    auto& l = layers[k];
    l.act = acts[k];
    l.weight.resize(dims[k + 1], dims[k]);
    l.bias.resize(dims[k + 1]);
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = get_f64(is);
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias[r] = get_f64(is);
  }
  return Mlp(std::move(layers));
}

}  // namespace myvt
