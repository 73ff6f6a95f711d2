#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "myvt/errors.hpp"

namespace myvt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class RegKind { L1, TV1D, TV2D };

RegKind reg_kind_from_string(const std::string& name);
std::string to_string(RegKind kind);

/// Nonsmooth convex regularizer g together with the settings of its proximal solver.
///
/// TV2D images are stored row-major: pixel (r, c) lives at index r * width + c.
struct Regularizer {
  RegKind kind = RegKind::L1;
  int height = 0;
  int width = 0;
  int admm_iters = 20;
  double admm_rho = 1.0;
  int cg_iters = 30;
  double cg_tol = 1e-8;

  static Regularizer l1() { return {}; }
  static Regularizer tv1d() {
    Regularizer g;
    g.kind = RegKind::TV1D;
    return g;
  }
  static Regularizer tv2d(int height, int width) {
    Regularizer g;
    g.kind = RegKind::TV2D;
    g.height = height;
    g.width = width;
    return g;
  }
};

/// Value of g: l1 norm, 1-D total variation, or anisotropic 2-D total variation.
double reg_value(const Regularizer& g, const Vec& x);

/// Soft-thresholding, the exact minimizer of ||y||_1 + ||x - y||^2 / (2t).
Vec prox_l1(const Vec& x, double t);

/// ADMM estimate of argmin_y TV1D(y) + ||x - y||^2 / (2t).
///
/// Splits z = Dy with D the first-difference operator and runs exactly `iters`
/// sweeps from y = x, z = Dx, u = 0. The y-step solves the tridiagonal system
/// (I/t + rho D^T D) y = x/t + rho D^T (z - u) directly.
Vec prox_tv1d(const Vec& x, double t, int iters, double rho);

/// Same scheme for the anisotropic 2-D TV of an h x w image, where D stacks
/// horizontal and vertical differences and the y-step runs conjugate gradients
/// (at most cg_iters iterations, stopping once the residual norm is <= cg_tol).
Vec prox_tv2d(const Vec& x, int height, int width, double t, int iters, double rho, int cg_iters,
              double cg_tol);

/// prox of g at scale t, dispatching on the regularizer kind.
Vec prox(const Regularizer& g, const Vec& x, double t);

/// Moreau-Yoshida envelope g^lambda(x) = g(p) + ||x - p||^2 / (2 lambda), p = prox(x).
///
/// Exact for l1. For the TV kinds p is the fixed-iteration ADMM estimate, so the
/// returned value is an upper bound on the true envelope.
double envelope_value(const Regularizer& g, const Vec& x, double lambda);

/// Gradient of the envelope, (x - prox(x)) / lambda.
Vec envelope_grad(const Regularizer& g, const Vec& x, double lambda);

/// Columnwise prox of a batch (one sample per column).
Mat prox_columns(const Regularizer& g, const Mat& xs, double t);

}  // namespace myvt
