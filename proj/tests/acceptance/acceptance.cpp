// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run criteria 1-9
//   acceptance 1 4 8      run a subset
//
// Exit status is 0 only when every selected criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "myvt/data.hpp"
#include "myvt/divergence.hpp"
#include "myvt/nn.hpp"
#include "myvt/prox.hpp"
#include "myvt/train.hpp"
#include "oracles.hpp"

using myvt::Mat;
using myvt::Regularizer;
using myvt::Vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records a sub-check; the criterion fails if any sub-check fails.
  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[192];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Vec uniform_vec(myvt::Rng& rng, Eigen::Index n, double lo, double hi) {
  Vec x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

// ---------------------------------------------------------------------------
// 1. Prox oracle suite

// ADMM sweeps used against the brute-force oracles. The training default of
// 20 sweeps at rho = 1 leaves errors up to ~6e-3 at small scales; 100 sweeps
// converge below 1e-6 on these instances.
constexpr int kConvergedAdmm = 100;

Outcome criterion_prox() {
  Outcome out;
  myvt::Rng rng(101);

  double worst_l1 = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double x = rng.uniform(-3, 3);
    const double t = rng.uniform(0.01, 2.0);
    const Vec y = oracle::grid_argmin_nd(
        [&](const Vec& v) { return std::abs(v[0]) + (x - v[0]) * (x - v[0]) / (2 * t); },
        Vec::Constant(1, -4.0), Vec::Constant(1, 4.0), 1e-8);
    worst_l1 = std::max(worst_l1, std::abs(myvt::prox_l1(Vec::Constant(1, x), t)[0] - y[0]));
  }
  out.check(worst_l1 <= 1e-6, fmt("soft-threshold 1000 scalars max err %.2e (tol 1e-6)", worst_l1));

  double worst_tv1 = 0.0;
  for (int k = 0; k < 60; ++k) {
    const auto d = static_cast<Eigen::Index>(2 + k % 3);
    const Vec x = uniform_vec(rng, d, -1, 1);
    const double t = rng.uniform(0.02, 1.0);
    const Vec want = oracle::grid_argmin_nd(
        [&](const Vec& y) { return oracle::tv1d(y) + (x - y).squaredNorm() / (2 * t); },
        Vec::Constant(d, -1.5), Vec::Constant(d, 1.5), 1e-6);
    const Vec got = myvt::prox_tv1d(x, t, kConvergedAdmm, 1.0);
    worst_tv1 = std::max(worst_tv1, (got - want).lpNorm<Eigen::Infinity>());
  }
  out.check(worst_tv1 <= 1e-3, fmt("TV1D 60 cases d<=4 max err %.2e (tol 1e-3)", worst_tv1));

  double worst_tv2 = 0.0;
  for (int k = 0; k < 60; ++k) {
    const Vec x = uniform_vec(rng, 4, -1, 1);
    const double t = rng.uniform(0.02, 1.0);
    const Vec want = oracle::grid_argmin_nd(
        [&](const Vec& y) { return oracle::tv2d(y, 2, 2) + (x - y).squaredNorm() / (2 * t); },
        Vec::Constant(4, -1.5), Vec::Constant(4, 1.5), 1e-6);
    const Vec got = myvt::prox_tv2d(x, 2, 2, t, kConvergedAdmm, 1.0, 30, 1e-8);
    worst_tv2 = std::max(worst_tv2, (got - want).lpNorm<Eigen::Infinity>());
  }
  out.check(worst_tv2 <= 1e-3, fmt("TV2D 60 cases 2x2 max err %.2e (tol 1e-3)", worst_tv2));
  return out;
}

// ---------------------------------------------------------------------------
// 2. Envelope properties

Outcome criterion_envelope() {
  Outcome out;
  myvt::Rng rng(202);
  constexpr int d = 100;
  constexpr double lambda = 0.05;

  Regularizer tv1 = Regularizer::tv1d();
  Regularizer tv2 = Regularizer::tv2d(10, 10);
  tv1.admm_iters = tv2.admm_iters = 300;
  tv2.cg_iters = 100;
  tv2.cg_tol = 1e-12;
  // Squared Lipschitz constants w.r.t. the Euclidean norm: |g(x) - g(y)| <= L ||x - y||.
  // l1: sqrt(d). TV: ||Dx||_1 <= sqrt(rows) ||Dx||_2 <= sqrt(rows) ||D|| ||x|| with
  // ||D||^2 <= 4 (1-D) and <= 8 (2-D).
  struct Case {
    const char* name;
    Regularizer g;
    double lipschitz_sq;
  };
  const std::vector<Case> cases = {
      {"l1", Regularizer::l1(), d},
      {"tv1d", tv1, 4.0 * (d - 1)},
      {"tv2d", tv2, 8.0 * (2 * 10 * 9)},
  };

  for (const auto& c : cases) {
    bool bound_ok = true;
    bool lip_ok = true;
    double worst_gap = 0.0;
    double worst_ratio = 0.0;
    const double bound = lambda / 2 * c.lipschitz_sq;
    for (int k = 0; k < 200; ++k) {
      const Vec x = rng.normal_vector(d) * rng.uniform(0.1, 3.0);
      const double gap = myvt::reg_value(c.g, x) - myvt::envelope_value(c.g, x, lambda);
      // The l1 bound is attained when every |x_i| > lambda; allow rounding only.
      if (!(gap >= -1e-9 && gap <= bound * (1 + 1e-12))) bound_ok = false;
      worst_gap = std::max(worst_gap, gap);

      const Vec y = x + rng.normal_vector(d) * rng.uniform(1e-3, 1.0);
      const double lhs = (myvt::envelope_grad(c.g, x, lambda) - myvt::envelope_grad(c.g, y, lambda)).norm();
      const double rhs = (x - y).norm() / lambda;
      worst_ratio = std::max(worst_ratio, lhs / rhs);
      if (lhs > rhs * (1 + 1e-6)) lip_ok = false;
    }
    out.check(bound_ok, std::string(c.name) + fmt(" 0<=g-g^l<=%.3g (max %.3g)", bound, worst_gap));
    out.check(lip_ok, std::string(c.name) + fmt(" grad 1/lambda-Lipschitz (max ratio %.4f)", worst_ratio));
  }

  // Finite differences away from kinks: keep every coordinate (l1) or difference
  // (TV1D) at least 0.02 away from the envelope's nonsmooth set.
  double worst_fd = 0.0;
  for (int k = 0; k < 20; ++k) {
    Vec x = rng.normal_vector(d);
    for (Eigen::Index i = 0; i < d; ++i)
      if (std::abs(std::abs(x[i]) - lambda) < 2e-2) x[i] += 0.05;
    const Vec fd = oracle::central_gradient(
        [&](const Vec& y) { return myvt::envelope_value(Regularizer::l1(), y, lambda); }, x, 1e-6);
    worst_fd = std::max(worst_fd, oracle::relative_error(myvt::envelope_grad(Regularizer::l1(), x, lambda), fd));
  }
  for (int k = 0; k < 10; ++k) {
    const Vec x = rng.normal_vector(12);
    const Vec fd = oracle::central_gradient(
        [&](const Vec& y) { return myvt::envelope_value(tv1, y, lambda); }, x, 1e-6);
    worst_fd = std::max(worst_fd, oracle::relative_error(myvt::envelope_grad(tv1, x, lambda), fd));
  }
  out.check(worst_fd <= 1e-3, fmt("envelope grad vs FD max rel err %.2e (tol 1e-3)", worst_fd));
  return out;
}

// ---------------------------------------------------------------------------
// 3. Gradient checks

Vec flatten(const std::vector<Mat>& ws, const std::vector<Vec>& bs) {
  std::vector<double> out;
  for (std::size_t l = 0; l < ws.size(); ++l) {
    out.insert(out.end(), ws[l].data(), ws[l].data() + ws[l].size());
    out.insert(out.end(), bs[l].data(), bs[l].data() + bs[l].size());
  }
  return Eigen::Map<Vec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Vec flatten(const myvt::Mlp& net) {
  std::vector<Mat> ws;
  std::vector<Vec> bs;
  for (const auto& l : net.layers()) {
    ws.push_back(l.weight);
    bs.push_back(l.bias);
  }
  return flatten(ws, bs);
}

void unflatten(myvt::Mlp& net, const Vec& p) {
  Eigen::Index k = 0;
  for (auto& l : net.layers()) {
    for (Eigen::Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = p[k++];
    for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = p[k++];
  }
}

myvt::Mlp random_net(myvt::Rng& rng, std::vector<int> dims, myvt::Activation hidden, myvt::Activation last) {
  std::vector<myvt::Activation> acts(dims.size() - 1, hidden);
  acts.back() = last;
  myvt::Mlp net = myvt::Mlp::init(dims, acts, rng);
  for (auto& l : net.layers()) l.bias = 0.3 * rng.normal_vector(l.bias.size());
  return net;
}

Outcome criterion_gradients() {
  using myvt::Activation;
  Outcome out;
  myvt::Rng rng(303);
  constexpr int kInstances = 12;

  double mlp_param = 0.0;
  double mlp_input = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    const Activation act = k % 3 == 0 ? Activation::Tanh : (k % 3 == 1 ? Activation::Sigmoid : Activation::Relu);
    myvt::Mlp net = random_net(rng, {5, 7, 6, 3}, act, Activation::Identity);
    const Mat xs = rng.normal_matrix(5, 4);
    const Mat dy = rng.normal_matrix(3, 4);
    myvt::Tape tape;
    net.forward(xs, &tape);
    const auto back = myvt::mlp_backward(net, tape, dy);
    const Vec p0 = flatten(net);
    const Vec fd = oracle::central_gradient(
        [&](const Vec& p) {
          unflatten(net, p);
          return (net.forward(xs).array() * dy.array()).sum();
        },
        p0, 1e-6);
    unflatten(net, p0);
    mlp_param = std::max(mlp_param, oracle::relative_error(flatten(back.params.weight, back.params.bias), fd));

    const Vec x = xs.col(0);
    const Vec dyc = dy.col(0);
    const Vec fdx = oracle::central_gradient([&](const Vec& y) { return net.forward(y).dot(dyc); }, x, 1e-6);
    myvt::Tape t1;
    net.forward(Mat(x), &t1);
    mlp_input = std::max(mlp_input, oracle::relative_error(myvt::mlp_backward(net, t1, Mat(dyc)).dx.col(0), fdx));
  }
  out.check(mlp_param <= 1e-4, fmt("MLP params max rel err %.2e", mlp_param));
  out.check(mlp_input <= 1e-4, fmt("MLP inputs max rel err %.2e", mlp_input));

  double kl = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    myvt::DualCritic critic{myvt::DivergenceKind::KL,
                            random_net(rng, {4, 8, 1}, Activation::Tanh, Activation::Identity), 1e-5};
    const Mat q = rng.normal_matrix(4, 9);
    const Mat pi = rng.normal_matrix(4, 11) * 1.5;
    const auto g = myvt::kl_dual_grads(critic, q, pi);
    const Vec p0 = flatten(critic.net);
    const Vec fd = oracle::central_gradient(
        [&](const Vec& p) {
          unflatten(critic.net, p);
          return myvt::kl_dual_objective(critic, q, pi);
        },
        p0, 1e-6);
    unflatten(critic.net, p0);
    kl = std::max(kl, oracle::relative_error(flatten(g.weight, g.bias), fd));
  }
  out.check(kl <= 1e-4, fmt("KL dual params max rel err %.2e", kl));

  double js = 0.0;
  for (int k = 0; k < kInstances; ++k) {
    const myvt::DualCritic critic{myvt::DivergenceKind::JS,
                                  random_net(rng, {6, 8, 1}, Activation::Tanh, Activation::Sigmoid), 1e-5};
    const Vec x = rng.normal_vector(6);
    const Vec fd = oracle::central_gradient(
        [&](const Vec& y) { return 0.5 * std::log((1.0 - critic.net.forward(y)[0]) / 2.0); }, x, 1e-6);
    js = std::max(js, oracle::relative_error(myvt::h_from_hprime_grad(critic, x).second, fd));
  }
  out.check(js <= 1e-4, fmt("JS grad_x h chain max rel err %.2e", js));
  return out;
}

// ---------------------------------------------------------------------------
// 4. KL dual sanity

Outcome criterion_kl_sanity() {
  Outcome out;
  myvt::Rng rng(404);
  const int n = 100000;
  const Mat q = rng.normal_matrix(1, n).array() + 1.0;
  const Mat pi = rng.normal_matrix(1, n);
  myvt::Mlp net({{Mat::Constant(1, 1, 1.0), Vec::Constant(1, -0.5), myvt::Activation::Identity}});
  const myvt::DualCritic critic{myvt::DivergenceKind::KL, net, 1e-5};
  const double est = myvt::kl_dual_objective(critic, q, pi);
  out.check(std::abs(est - 0.5) <= 0.05, fmt("dual estimate %.4f vs KL 0.5 (tol 0.05)", est));
  return out;
}

// ---------------------------------------------------------------------------
// 5-7. Synthetic case studies

struct RunSummary {
  double mse0 = 0.0;
  double mse = 0.0;
  double l1 = 0.0;
  double tv = 0.0;
  double max_param = 0.0;
  bool aborted = false;
  std::string error;
  double seconds = 0.0;
};

myvt::Dataset case_data(myvt::SyntheticCase kind) {
  myvt::SyntheticSpec spec;
  spec.kind = kind;
  spec.seed = 0;
  return myvt::make_dataset(spec);
}

// Step sizes follow the reported ones where the text gives them (VT 0.01, MYVT
// particle 1e-4, generator 1e-5); the critic rate is not reported and was tuned.
myvt::TrainConfig case_config(myvt::Method method, myvt::DivergenceKind div, myvt::SyntheticCase kind) {
  myvt::TrainConfig c;
  c.method = method;
  c.divergence = div;
  c.seed = 0;
  const bool tv = kind == myvt::SyntheticCase::PiecewiseConstant;
  c.regularizer = tv ? Regularizer::tv1d() : Regularizer::l1();
  c.iterations = tv ? 4000 : 2000;
  if (method == myvt::Method::VT) {
    // JS witness gradients are ~100x weaker than KL ones (saturating
    // discriminator); at 0.01 the JS baseline barely leaves its initialization.
    c.eta_particle = div == myvt::DivergenceKind::JS ? 1.0 : 1e-2;
    c.eta_critic = 1e-2;
  } else if (!tv) {
    c.eta_critic = 1e-2;
  } else {
    // The TV case starts far from the target (MSE ~2); plain SGD on the
    // generator diverged for every critic/generator rate tried, Adam is stable.
    c.optimizer = myvt::OptimizerKind::Adam;
    c.eta_critic = 1e-4;
  }
  return c;
}

RunSummary run_case(const myvt::TrainConfig& config, const myvt::Dataset& data) {
  RunSummary s;
  myvt::RunOptions opts;
  opts.record_wall_time = false;
  opts.on_iteration = [&](const myvt::MetricsRow&, const myvt::TrainState& st) {
    s.max_param = std::max({s.max_param, st.generator.max_abs_parameter(), st.critic.net.max_abs_parameter()});
  };
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto r = myvt::run_training(config, data, opts);
    s.mse0 = r.rows.front().mse;
    s.mse = r.rows.back().mse;
    s.l1 = r.rows.back().avg_l1;
    s.tv = r.rows.back().avg_tv;
  } catch (const myvt::TrainingAborted& e) {
    s.aborted = true;
    s.error = e.what();
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::string describe(const char* name, const RunSummary& s) {
  if (s.aborted) return std::string(name) + " aborted: " + s.error;
  return std::string(name) + fmt(" mse %.4f->%.4f", s.mse0, s.mse) + fmt(" l1 %.2f tv %.2f", s.l1, s.tv) +
         fmt(" (%.0fs)", s.seconds);
}

// Shared body of criteria 5-7 for one (divergence, case) pair.
void compare_methods(Outcome& out, myvt::DivergenceKind div, myvt::SyntheticCase kind, double ratio_tol,
                     double paper_value, bool band_required, bool require_mse) {
  const auto data = case_data(kind);
  const bool tv = kind == myvt::SyntheticCase::PiecewiseConstant;
  const std::string tag = myvt::to_string(div) + (tv ? "+tv" : "+l1");
  const RunSummary my = run_case(case_config(myvt::Method::MYVT, div, kind), data);
  const RunSummary vt = run_case(case_config(myvt::Method::VT, div, kind), data);
  out.check(!my.aborted && !vt.aborted, tag + " " + describe("MYVT", my) + ", " + describe("VT", vt));
  if (my.aborted || vt.aborted) return;
  out.check(my.max_param < 1e6 && vt.max_param < 1e6,
            tag + fmt(" max |param| %.3g / %.3g (< 1e6)", my.max_param, vt.max_param));
  if (require_mse)
    out.check(my.mse < 0.25 * my.mse0 && vt.mse < 0.25 * vt.mse0, tag + " both final mse < 25% of iteration 0");
  const double my_norm = tv ? my.tv : my.l1;
  const double vt_norm = tv ? vt.tv : vt.l1;
  out.check(my_norm <= ratio_tol * vt_norm,
            tag + fmt(" MYVT/VT norm ratio %.3f (<= %.2f)", my_norm / vt_norm, ratio_tol));
  if (band_required)
    out.check(std::abs(my_norm - paper_value) <= 0.5 * paper_value,
              tag + fmt(" MYVT norm %.2f within 50%% of %.2f", my_norm, paper_value));
  else
    out.check(true, tag + fmt(" (info) MYVT norm %.2f, reported %.2f", my_norm, paper_value));
}

Outcome criterion_case1() {
  Outcome out;
  compare_methods(out, myvt::DivergenceKind::KL, myvt::SyntheticCase::Sparse, 0.7, 15.81, true, true);
  return out;
}

Outcome criterion_case2() {
  Outcome out;
  compare_methods(out, myvt::DivergenceKind::KL, myvt::SyntheticCase::PiecewiseConstant, 0.75, 18.52, true, false);
  return out;
}

Outcome criterion_js() {
  Outcome out;
  compare_methods(out, myvt::DivergenceKind::JS, myvt::SyntheticCase::Sparse, 0.7, 16.35, false, false);
  compare_methods(out, myvt::DivergenceKind::JS, myvt::SyntheticCase::PiecewiseConstant, 0.75, 19.35, false, false);
  return out;
}

// ---------------------------------------------------------------------------
// 8. Reduction and determinism

myvt::TrainConfig small_config(myvt::Method method) {
  myvt::TrainConfig c;
  c.method = method;
  c.iterations = 30;
  c.batch_size = 32;
  c.n_particles = 64;
  c.noise_dim = 16;
  c.generator_hidden = {32, 32};
  c.critic_hidden = {32};
  c.eta_critic = 1e-2;
  c.eta_particle = method == myvt::Method::VT ? 1e-2 : 1e-4;
  c.seed = 8;
  return c;
}

std::string metrics_csv(const myvt::TrainConfig& config, const myvt::Dataset& data) {
  myvt::RunOptions opts;
  opts.record_wall_time = false;
  std::ostringstream os;
  myvt::write_metrics_header(os);
  opts.on_iteration = [&](const myvt::MetricsRow& row, const myvt::TrainState&) { myvt::write_metrics_row(os, row); };
  myvt::run_training(config, data, opts);
  return os.str();
}

Outcome criterion_reduction() {
  Outcome out;
  myvt::SyntheticSpec spec;
  spec.dim = 20;
  spec.n_examples = 100;
  spec.sparsity = 3;
  const auto data = myvt::make_dataset(spec);

  // Train a VT critic for a while, then hand the same critic to MYVT.
  myvt::TrainConfig vt = small_config(myvt::Method::VT);
  myvt::TrainState state = myvt::init_state(vt, spec.dim);
  for (int k = 0; k < 20; ++k) myvt::vt_iteration(state, vt, data);
  myvt::TrainConfig my = small_config(myvt::Method::MYVT);
  my.alpha = 0.0;
  my.inner_steps = 1;
  const Mat xs = state.particles.particles;
  const Mat d_vt = myvt::transport_direction(state.critic, xs);
  const Mat d_my = myvt::particle_delta(state.critic, my.regularizer, xs, my.alpha, my.lambda);
  const double diff = (d_vt - d_my).cwiseAbs().maxCoeff();
  out.check(diff <= 1e-12, fmt("MYVT(alpha=0,T=1) vs VT direction max diff %.1e (tol 1e-12)", diff));

  // Also through a real MYVT iteration: the particles it produces equal x - eta * VT direction.
  myvt::TrainState ms = myvt::init_state(my, spec.dim);
  myvt::Rng probe = ms.rng;
  const Mat x0 = ms.generator.forward(probe.normal_matrix(my.noise_dim, my.batch_size));
  const Mat expect = x0 - my.eta_particle * myvt::transport_direction(ms.critic, x0);
  const auto row = myvt::myvt_iteration(ms, my, data);
  const auto want = myvt::evaluate_metrics(expect, data.truth, Regularizer::l1(), Regularizer::tv1d());
  out.check(std::abs(row.mse - want.mse) <= 1e-12 && std::abs(row.avg_l1 - want.avg_l1) <= 1e-12,
            "myvt_iteration particles match one VT step");

  bool same = true;
  for (myvt::Method m : {myvt::Method::MYVT, myvt::Method::VT})
    for (myvt::DivergenceKind dk : {myvt::DivergenceKind::KL, myvt::DivergenceKind::JS}) {
      myvt::TrainConfig c = small_config(m);
      c.divergence = dk;
      same = same && metrics_csv(c, data) == metrics_csv(c, data);
    }
  out.check(same, "fixed-seed reruns give byte-identical metrics CSVs (4 configs)");
  return out;
}

// ---------------------------------------------------------------------------
// 9. Descent diagnostic

struct DescentTrace {
  int violations = 0;
  double worst_rise = 0.0;
  double at_start = 0.0;
  double at_end = 0.0;
};

// Trains the 1-D toy for `iterations` steps and checks the 50-iteration moving
// average of the smoothed objective after iteration 200.
DescentTrace descent_trace(std::uint64_t seed, int iterations) {
  // Target: 500 draws from N(0, 0.25).
  myvt::Dataset data;
  data.truth = Vec::Zero(1);
  myvt::Rng data_rng(909);
  data.examples = data_rng.normal_matrix(500, 1) * 0.5;

  // The generator starts wide (init_scale 4) and moves slowly, so the run is
  // still in its descent phase at the horizon. Once q matches pi the estimate
  // only fluctuates around its floor and no strict monotonicity can hold.
  myvt::TrainConfig c;
  c.divergence = myvt::DivergenceKind::KL;
  c.regularizer = Regularizer::l1();
  c.alpha = 0.1;
  c.iterations = iterations;
  c.batch_size = 100;
  c.noise_dim = 4;
  c.generator_hidden = {16};
  c.critic_hidden = {16};
  c.generator_activation = c.critic_activation = myvt::Activation::Tanh;
  c.init_scale = 4.0;
  c.eta_particle = 1e-3;
  c.eta_generator = 1e-5;
  c.eta_critic = 1e-2;
  c.critic_steps = 5;
  c.seed = seed;

  // Common random numbers: every evaluation uses the same noise and target
  // draws, so changes in the estimate reflect changes in (theta, W) only.
  constexpr std::uint64_t kEvalSeed = 4242;
  constexpr int kEvalSamples = 2000;
  constexpr int kWindow = 50;
  constexpr int kStart = 200;

  DescentTrace t;
  myvt::TrainState state = myvt::init_state(c, 1);
  std::vector<double> objective;
  double previous = 0.0;
  double sum = 0.0;
  for (int k = 0; k < c.iterations; ++k) {
    myvt::myvt_iteration(state, c, data);
    myvt::Rng eval_rng(kEvalSeed);
    objective.push_back(myvt::smoothed_objective_estimate(state, c, data, kEvalSamples, eval_rng));
    sum += objective.back();
    if (k >= kWindow) sum -= objective[static_cast<std::size_t>(k - kWindow)];
    if (k + 1 < kWindow) continue;
    const double avg = sum / kWindow;
    if (k == kStart) t.at_start = avg;
    if (k > kStart && avg - previous > 1e-12) {
      ++t.violations;
      t.worst_rise = std::max(t.worst_rise, avg - previous);
    }
    previous = avg;
  }
  t.at_end = previous;
  return t;
}

Outcome criterion_descent() {
  Outcome out;
  constexpr int kIterations = 500;
  const DescentTrace t = descent_trace(9, kIterations);
  out.check(t.violations == 0,
            "seed 9: moving average rises " + std::to_string(t.violations) + " times after it 200" +
                fmt(" (worst +%.2e); %.4f -> %.4f", t.worst_rise, t.at_start, t.at_end));

  // Informational: how often the same check holds for other seeds.
  int monotone = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) monotone += descent_trace(seed, kIterations).violations == 0;
  out.check(true, "seed sweep 1-8 (info): " + std::to_string(monotone) + "/8 monotone");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"prox oracle suite", criterion_prox},
      {"envelope properties", criterion_envelope},
      {"gradient checks", criterion_gradients},
      {"KL dual sanity", criterion_kl_sanity},
      {"case study 1 (KL + l1)", criterion_case1},
      {"case study 2 (KL + TV1D)", criterion_case2},
      {"JS variants", criterion_js},
      {"reduction and determinism", criterion_reduction},
      {"descent diagnostic", criterion_descent},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::printf("[%s] criterion %d: %s (%.1fs) -- %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
