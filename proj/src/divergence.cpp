#include "myvt/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace myvt {

DivergenceKind divergence_from_string(const std::string& name) {
  if (name == "kl") return DivergenceKind::KL;
  if (name == "js") return DivergenceKind::JS;
  throw std::invalid_argument("unknown divergence '" + name + "' (expected kl or js)");
}

std::string to_string(DivergenceKind kind) { return kind == DivergenceKind::KL ? "kl" : "js"; }

namespace {

void require_batches(const Mat& xs_q, const Mat& xs_pi) {
  if (xs_q.cols() == 0 || xs_pi.cols() == 0) throw std::invalid_argument("empty sample batch");
}

void require_scalar_critic(const DualCritic& critic) {
  if (critic.net.out_dim() != 1) throw ShapeError("critic network must have a scalar output");
}

// Clamped discriminator values and a mask of samples strictly inside the clamp.
struct Clamped {
  Vec value;
  Vec inside;  // 1 inside, 0 on a boundary
};

Clamped clamp_hprime(const Vec& raw, double eps) {
  Clamped c{raw, Vec::Ones(raw.size())};
  for (Eigen::Index i = 0; i < raw.size(); ++i) {
    if (raw[i] <= eps) {
      c.value[i] = eps;
      c.inside[i] = 0.0;
    } else if (raw[i] >= 1.0 - eps) {
      c.value[i] = 1.0 - eps;
      c.inside[i] = 0.0;
    }
  }
  return c;
}

Vec softmax(const Vec& v) {
  const Vec e = (v.array() - v.maxCoeff()).exp().matrix();
  return e / e.sum();
}

}  // namespace

double log_mean_exp(const Vec& v) {
  if (v.size() == 0) throw std::invalid_argument("log-mean-exp of empty vector");
  const double top = v.maxCoeff();
  return top + std::log((v.array() - top).exp().mean());
}

double kl_dual_objective(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi) {
  require_batches(xs_q, xs_pi);
  require_scalar_critic(critic);
  const Vec hq = critic.net.forward(xs_q).row(0).transpose();
  const Vec hp = critic.net.forward(xs_pi).row(0).transpose();
  return hq.mean() - log_mean_exp(hp);
}

MlpGrads kl_dual_grads(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi) {
  require_batches(xs_q, xs_pi);
  require_scalar_critic(critic);
  Tape tq;
  Tape tp;
  critic.net.forward(xs_q, &tq);
  const Vec hp = critic.net.forward(xs_pi, &tp).row(0).transpose();
  const Mat dq = Mat::Constant(1, xs_q.cols(), 1.0 / static_cast<double>(xs_q.cols()));
  const Mat dp = -softmax(hp).transpose();
  MlpGrads g = mlp_backward(critic.net, tq, dq).params;
  g += mlp_backward(critic.net, tp, dp).params;
  return g;
}

double js_dual_objective(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi) {
  require_batches(xs_q, xs_pi);
  require_scalar_critic(critic);
  const Vec dq = clamp_hprime(critic.net.forward(xs_q).row(0).transpose(), critic.clamp_eps).value;
  const Vec dp = clamp_hprime(critic.net.forward(xs_pi).row(0).transpose(), critic.clamp_eps).value;
  return 0.5 * (1.0 - dq.array()).log().mean() + 0.5 * dp.array().log().mean();
}

MlpGrads js_dual_grads(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi) {
  require_batches(xs_q, xs_pi);
  require_scalar_critic(critic);
  Tape tq;
  Tape tp;
  const Clamped cq = clamp_hprime(critic.net.forward(xs_q, &tq).row(0).transpose(), critic.clamp_eps);
  const Clamped cp = clamp_hprime(critic.net.forward(xs_pi, &tp).row(0).transpose(), critic.clamp_eps);
  const double nq = static_cast<double>(xs_q.cols());
  const double np = static_cast<double>(xs_pi.cols());
  const Mat dq = (-0.5 / nq * cq.inside.array() / (1.0 - cq.value.array())).matrix().transpose();
  const Mat dp = (0.5 / np * cp.inside.array() / cp.value.array()).matrix().transpose();
  MlpGrads g = mlp_backward(critic.net, tq, dq).params;
  g += mlp_backward(critic.net, tp, dp).params;
  return g;
}

double dual_objective(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi) {
  return critic.kind == DivergenceKind::KL ? kl_dual_objective(critic, xs_q, xs_pi)
                                           : js_dual_objective(critic, xs_q, xs_pi);
}

MlpGrads dual_grads(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi) {
  return critic.kind == DivergenceKind::KL ? kl_dual_grads(critic, xs_q, xs_pi)
                                           : js_dual_grads(critic, xs_q, xs_pi);
}

WitnessGrad witness_grad(const DualCritic& critic, const Mat& xs) {
  require_scalar_critic(critic);
  Tape tape;
  const Vec raw = critic.net.forward(xs, &tape).row(0).transpose();
  WitnessGrad out;
  if (critic.kind == DivergenceKind::KL) {
    out.value = raw;
    out.grad = mlp_backward(critic.net, tape, Mat::Ones(1, xs.cols())).dx;
    return out;
  }
  const Clamped c = clamp_hprime(raw, critic.clamp_eps);
  out.value = (0.5 * ((1.0 - c.value.array()) / 2.0).log()).matrix();
  // dh/dh' = -1 / (2 (1 - h')), zero across the clamp.
  const Mat dy = (-0.5 * c.inside.array() / (1.0 - c.value.array())).matrix().transpose();
  out.grad = mlp_backward(critic.net, tape, dy).dx;
  return out;
}

std::pair<double, Vec> h_from_hprime_grad(const DualCritic& critic, const Vec& x) {
  if (critic.kind != DivergenceKind::JS)
    throw std::invalid_argument("h_from_hprime_grad needs a JS critic");
  WitnessGrad w = witness_grad(critic, Mat(x));
  return {w.value[0], w.grad.col(0)};
}

void critic_update(DualCritic& critic, const Mat& xs_q, const Mat& xs_pi, int steps,
                   Optimizer& optimizer, double eta) {
  if (steps < 1) throw std::invalid_argument("critic update needs at least one step");
  for (int s = 0; s < steps; ++s) {
    MlpGrads g = dual_grads(critic, xs_q, xs_pi);
    g *= -1.0;  // ascent
    optimizer.descend(critic.net, g, eta);
  }
}

}  // namespace myvt
