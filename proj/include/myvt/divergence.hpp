#pragma once

#include <string>
#include <utility>

#include "myvt/nn.hpp"

namespace myvt {

enum class DivergenceKind { KL, JS };

DivergenceKind divergence_from_string(const std::string& name);
std::string to_string(DivergenceKind kind);

/// Dual witness for the variational form of F.
///
/// For KL the network output is h(x) itself. For JS the network outputs the
/// discriminator h'(x) = 1 - 2 exp(2 h(x)), which is clamped to
/// [clamp_eps, 1 - clamp_eps] before use; h is recovered only where particle
/// gradients need it.
struct DualCritic {
  DivergenceKind kind = DivergenceKind::KL;
  Mlp net;
  double clamp_eps = 1e-5;
};

/// Batches hold one sample per column.

/// mean_q h - log mean_pi exp(h), with max-subtraction in the log-mean-exp.
double kl_dual_objective(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi);
/// Exact parameter gradient of kl_dual_objective; the log-mean-exp term
/// contributes a softmax-weighted average of grad_W h over the pi batch.
MlpGrads kl_dual_grads(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi);

/// (1/2) mean_q log(1 - h') + (1/2) mean_pi log h'.
///
/// At the optimum this equals JS(q, pi) - log 2; the constant is kept.
double js_dual_objective(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi);
MlpGrads js_dual_grads(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi);

double dual_objective(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi);
MlpGrads dual_grads(const DualCritic& critic, const Mat& xs_q, const Mat& xs_pi);

/// h = (1/2) log((1 - h') / 2) and its input gradient -grad h' / (2 (1 - h')).
/// The gradient is zero where h' sits on a clamp boundary.
std::pair<double, Vec> h_from_hprime_grad(const DualCritic& critic, const Vec& x);

/// Witness values h(x_j) and input gradients grad_x h(x_j) for a batch, using
/// the change of variable for JS critics.
struct WitnessGrad {
  Vec value;
  Mat grad;
};
WitnessGrad witness_grad(const DualCritic& critic, const Mat& xs);

/// T' ascent steps on the kind-appropriate dual objective over fixed batches.
void critic_update(DualCritic& critic, const Mat& xs_q, const Mat& xs_pi, int steps,
                   Optimizer& optimizer, double eta);

/// log(mean(exp(v))), stable for large |v|.
double log_mean_exp(const Vec& v);

}  // namespace myvt
