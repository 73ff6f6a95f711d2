#include "myvt/train.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "myvt/parallel.hpp"

namespace myvt {

Method method_from_string(const std::string& name) {
  if (name == "myvt") return Method::MYVT;
  if (name == "vt") return Method::VT;
  throw std::invalid_argument("unknown method '" + name + "' (expected myvt or vt)");
}

std::string to_string(Method m) { return m == Method::MYVT ? "myvt" : "vt"; }

void TrainConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  auto at_least_one = [](long v, const char* name) {
    if (v < 1) throw std::invalid_argument(std::string(name) + " must be at least 1");
  };
  if (!(alpha >= 0.0)) throw std::invalid_argument("alpha must be nonnegative");
  positive(lambda, "lambda");
  if (!(eta_particle >= 0.0) || !(eta_generator >= 0.0) || !(eta_critic >= 0.0))
    throw std::invalid_argument("step sizes must be nonnegative");
  at_least_one(iterations, "iterations");
  at_least_one(inner_steps, "inner_steps");
  at_least_one(critic_steps, "critic_steps");
  at_least_one(batch_size, "batch_size");
  at_least_one(n_particles, "n_particles");
  at_least_one(noise_dim, "noise_dim");
  for (int w : generator_hidden) at_least_one(w, "generator_hidden width");
  for (int w : critic_hidden) at_least_one(w, "critic_hidden width");
  positive(init_scale, "init_scale");
  if (!(clamp_eps > 0.0 && clamp_eps < 0.5)) throw std::invalid_argument("clamp_eps must lie in (0, 0.5)");
  if (regularizer.admm_iters < 1 || !(regularizer.admm_rho > 0.0))
    throw std::invalid_argument("ADMM needs positive iterations and rho");
}

namespace {

Mlp make_network(int in, const std::vector<int>& hidden, int out, Activation hidden_act,
                 Activation out_act, Rng& rng, double scale) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  std::vector<Activation> acts(dims.size() - 1, hidden_act);
  acts.back() = out_act;
  return Mlp::init(dims, acts, rng, scale);
}

void require_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string("non-finite ") + what);
}

}  // namespace

TrainState init_state(const TrainConfig& config, int dim) {
  config.validate();
  if (config.regularizer.kind == RegKind::TV2D &&
      static_cast<long>(config.regularizer.height) * config.regularizer.width != dim)
    throw ShapeError("TV2D shape does not match data dimension");
  TrainState state;
  state.rng = Rng(config.seed);
  state.generator = make_network(config.noise_dim, config.generator_hidden, dim,
                                 config.generator_activation, Activation::Identity, state.rng,
                                 config.init_scale);
  state.critic.kind = config.divergence;
  state.critic.clamp_eps = config.clamp_eps;
  state.critic.net = make_network(
      dim, config.critic_hidden, 1, config.critic_activation,
      config.divergence == DivergenceKind::JS ? Activation::Sigmoid : Activation::Identity, state.rng,
      config.init_scale);
  state.generator_optimizer = Optimizer(config.optimizer, state.generator);
  state.critic_optimizer = Optimizer(config.optimizer, state.critic.net);
  if (config.method == Method::VT) state.particles.particles = state.rng.normal_matrix(dim, config.n_particles);
  return state;
}

Mat transport_direction(const DualCritic& critic, const Mat& xs) {
  return witness_grad(critic, xs).grad;
}

Mat particle_delta(const DualCritic& critic, const Regularizer& g, const Mat& xs, double alpha,
                   double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  Mat delta = transport_direction(critic, xs);
  if (alpha != 0.0) delta += (alpha / lambda) * (xs - prox_columns(g, xs, lambda));
  require_finite(delta, "particle direction");
  return delta;
}

Vec particle_delta(const DualCritic& critic, const Regularizer& g, const Vec& x, double alpha,
                   double lambda) {
  return particle_delta(critic, g, Mat(x), alpha, lambda).col(0);
}

Mat sample_target_batch(const Mat& examples, int m, Rng& rng) {
  if (examples.rows() == 0) throw std::invalid_argument("target sample set is empty");
  Mat batch(examples.cols(), m);
  for (int j = 0; j < m; ++j) {
    const auto row = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(examples.rows())));
    batch.col(j) = examples.row(row).transpose();
  }
  return batch;
}

MetricsRow evaluate_metrics(const Mat& samples, const Vec& truth, const Regularizer& g_l1,
                            const Regularizer& g_tv) {
  if (samples.cols() == 0) throw std::invalid_argument("cannot evaluate metrics on an empty batch");
  if (samples.rows() != truth.size()) throw ShapeError("sample dimension does not match truth");
  const auto n = static_cast<double>(samples.cols());
  const auto d = static_cast<double>(samples.rows());
  MetricsRow row;
  row.mse = (samples.colwise() - truth).colwise().squaredNorm().sum() / (n * d);
  double l1 = 0.0;
  double tv = 0.0;
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    const Vec x = samples.col(j);
    l1 += reg_value(g_l1, x);
    tv += reg_value(g_tv, x);
  }
  row.avg_l1 = l1 / n;
  row.avg_tv = tv / n;
  return row;
}

Regularizer metric_tv(const TrainConfig& config) {
  return config.regularizer.kind == RegKind::L1 ? Regularizer::tv1d() : config.regularizer;
}

MetricsRow myvt_iteration(TrainState& state, const TrainConfig& config, const Dataset& target) {
  if (target.examples.rows() == 0) throw std::invalid_argument("target sample set is empty");
  const Mat noise = state.rng.normal_matrix(config.noise_dim, config.batch_size);
  Tape tape;
  Mat xs = state.generator.forward(noise, &tape);
  for (int t = 0; t < config.inner_steps; ++t) {
    if (t > 0) state.generator.forward(noise, &tape);  // VJP at the current theta
    const Mat delta = particle_delta(state.critic, config.regularizer, xs, config.alpha, config.lambda);
    xs -= config.eta_particle * delta;
    const MlpGrads grads = mlp_backward(state.generator, tape, delta).params;
    state.generator_optimizer.descend(state.generator, grads, config.eta_generator);
  }
  require_finite(xs, "particles");

  const Mat batch = sample_target_batch(target.examples, config.batch_size, state.rng);
  critic_update(state.critic, xs, batch, config.critic_steps, state.critic_optimizer, config.eta_critic);

  MetricsRow row = evaluate_metrics(xs, target.truth, Regularizer::l1(), metric_tv(config));
  row.dual_objective = dual_objective(state.critic, xs, batch);
  row.iteration = state.iteration++;
  return row;
}

MetricsRow vt_iteration(TrainState& state, const TrainConfig& config, const Dataset& target) {
  Mat& particles = state.particles.particles;
  if (particles.cols() == 0) throw std::invalid_argument("VT particle set is not initialized");
  const Mat batch = sample_target_batch(target.examples, config.batch_size, state.rng);
  critic_update(state.critic, particles, batch, config.critic_steps, state.critic_optimizer,
                config.eta_critic);
  const double dual = dual_objective(state.critic, particles, batch);
  particles -= config.eta_particle * transport_direction(state.critic, particles);
  require_finite(particles, "particles");

  MetricsRow row = evaluate_metrics(particles, target.truth, Regularizer::l1(), metric_tv(config));
  row.dual_objective = dual;
  row.iteration = state.iteration++;
  return row;
}

double smoothed_objective_estimate(const TrainState& state, const TrainConfig& config,
                                   const Dataset& target, int n_eval, Rng& eval_rng) {
  if (n_eval < 1) throw std::invalid_argument("n_eval must be at least 1");
  const Mat noise = eval_rng.normal_matrix(config.noise_dim, n_eval);
  const Mat xs = state.generator.forward(noise);
  const Mat batch = sample_target_batch(target.examples, n_eval, eval_rng);
  const double dual = dual_objective(state.critic, xs, batch);
  if (config.alpha == 0.0) return dual;
  std::vector<double> env(static_cast<std::size_t>(n_eval));
  parallel_for(env.size(), [&](std::size_t j) {
    env[j] = envelope_value(config.regularizer, xs.col(static_cast<Eigen::Index>(j)), config.lambda);
  });
  double sum = 0.0;
  for (double e : env) sum += e;  // fixed order
  return dual + config.alpha * sum / n_eval;
}

std::string write_checkpoint(const TrainState& state, const std::string& prefix) {
  save_checkpoint(state.generator, prefix + ".generator.ckpt");
  save_checkpoint(state.critic.net, prefix + ".critic.ckpt");
  return prefix;
}

RunResult run_training(const TrainConfig& config, const Dataset& target, const RunOptions& options) {
  RunResult result;
  result.state = init_state(config, static_cast<int>(target.truth.size()));
  const bool checkpoints = !options.checkpoint_prefix.empty();
  result.rows.reserve(static_cast<std::size_t>(config.iterations));
  for (int k = 0; k < config.iterations; ++k) {
    const auto start = std::chrono::steady_clock::now();
    MetricsRow row;
    try {
      row = config.method == Method::MYVT ? myvt_iteration(result.state, config, target)
                                          : vt_iteration(result.state, config, target);
      if (!result.state.generator.all_finite() || !result.state.critic.net.all_finite())
        throw NumericalError("non-finite network parameter");
    } catch (const NumericalError& e) {
      throw TrainingAborted(std::string(e.what()) + " at iteration " + std::to_string(k), k,
                            result.last_checkpoint);
    }
    if (options.record_wall_time) {
      row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
    result.rows.push_back(row);
    if (options.on_iteration) options.on_iteration(row, result.state);
    if (checkpoints && options.checkpoint_interval > 0 && (k + 1) % options.checkpoint_interval == 0)
      result.last_checkpoint = write_checkpoint(result.state, options.checkpoint_prefix);
  }
  if (checkpoints) result.last_checkpoint = write_checkpoint(result.state, options.checkpoint_prefix);
  return result;
}

void write_metrics_header(std::ostream& os) { os << "iter,mse,avg_l1,avg_tv,dual_obj,wall_ms\n"; }

void write_metrics_row(std::ostream& os, const MetricsRow& row) {
  os << row.iteration << ',' << format_double(row.mse) << ',' << format_double(row.avg_l1) << ','
     << format_double(row.avg_tv) << ',' << format_double(row.dual_objective) << ','
     << format_double(row.wall_ms) << '\n';
}

}  // namespace myvt
