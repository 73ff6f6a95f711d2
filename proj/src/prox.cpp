#include "myvt/prox.hpp"

#include <cmath>
#include <vector>

#include "myvt/parallel.hpp"

namespace myvt {

RegKind reg_kind_from_string(const std::string& name) {
  if (name == "l1") return RegKind::L1;
  if (name == "tv1d" || name == "tv") return RegKind::TV1D;
  if (name == "tv2d") return RegKind::TV2D;
  throw std::invalid_argument("unknown regularizer '" + name + "' (expected l1, tv1d or tv2d)");
}

std::string to_string(RegKind kind) {
  switch (kind) {
    case RegKind::L1: return "l1";
    case RegKind::TV1D: return "tv1d";
    case RegKind::TV2D: return "tv2d";
  }
  return "?";
}

namespace {

void check_image(const Vec& x, int height, int width) {
  if (height < 1 || width < 1 || static_cast<Eigen::Index>(height) * width != x.size()) {
    throw ShapeError("TV2D expects " + std::to_string(height) + "x" + std::to_string(width) +
                     " image, got vector of length " + std::to_string(x.size()));
  }
}

double soft(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// First differences (Dy)_i = y_{i+1} - y_i.
Vec diff1d(const Vec& y) { return y.tail(y.size() - 1) - y.head(y.size() - 1); }

// Adjoint of diff1d.
Vec diff1d_adjoint(const Vec& v, Eigen::Index n) {
  Vec out = Vec::Zero(n);
  out.tail(n - 1) += v;
  out.head(n - 1) -= v;
  return out;
}

// Horizontal differences first (height * (width-1) entries, row-major), then
// vertical differences (height-1) * width.
struct Grid {
  int h;
  int w;

  Eigen::Index horizontal() const { return static_cast<Eigen::Index>(h) * (w - 1); }
  Eigen::Index size() const { return horizontal() + static_cast<Eigen::Index>(h - 1) * w; }

  Vec apply(const Vec& y) const {
    Vec out(size());
    Eigen::Index k = 0;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c + 1 < w; ++c) out[k++] = y[r * w + c + 1] - y[r * w + c];
    for (int r = 0; r + 1 < h; ++r)
      for (int c = 0; c < w; ++c) out[k++] = y[(r + 1) * w + c] - y[r * w + c];
    return out;
  }

  Vec adjoint(const Vec& v) const {
    Vec out = Vec::Zero(static_cast<Eigen::Index>(h) * w);
    Eigen::Index k = 0;
    for (int r = 0; r < h; ++r)
      for (int c = 0; c + 1 < w; ++c, ++k) {
        out[r * w + c + 1] += v[k];
        out[r * w + c] -= v[k];
      }
    for (int r = 0; r + 1 < h; ++r)
      for (int c = 0; c < w; ++c, ++k) {
        out[(r + 1) * w + c] += v[k];
        out[r * w + c] -= v[k];
      }
    return out;
  }
};

// Thomas algorithm for (I/t + rho D^T D), factored once per prox call.
class TridiagonalSolver {
 public:
  TridiagonalSolver(Eigen::Index n, double t, double rho) : upper_(n), inv_pivot_(n), off_(-rho) {
    double prev_upper = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double degree = (i == 0 || i == n - 1) ? 1.0 : 2.0;
      const double diag = 1.0 / t + rho * degree;
      const double pivot = diag - (i > 0 ? off_ * prev_upper : 0.0);
      inv_pivot_[i] = 1.0 / pivot;
      upper_[i] = off_ * inv_pivot_[i];
      prev_upper = upper_[i];
    }
  }

  Vec solve(const Vec& rhs) const {
    const Eigen::Index n = rhs.size();
    Vec y(n);
    double prev = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = (rhs[i] - (i > 0 ? off_ * prev : 0.0)) * inv_pivot_[i];
      prev = y[i];
    }
    for (Eigen::Index i = n - 2; i >= 0; --i) y[i] -= upper_[i] * y[i + 1];
    return y;
  }

 private:
  Vec upper_;
  Vec inv_pivot_;
  double off_;
};

}  // namespace

double reg_value(const Regularizer& g, const Vec& x) {
  switch (g.kind) {
    case RegKind::L1:
      return x.lpNorm<1>();
    case RegKind::TV1D:
      if (x.size() < 2) return 0.0;
      return diff1d(x).lpNorm<1>();
    case RegKind::TV2D:
      check_image(x, g.height, g.width);
      return Grid{g.height, g.width}.apply(x).lpNorm<1>();
  }
  return 0.0;
}

Vec prox_l1(const Vec& x, double t) {
  return x.unaryExpr([t](double v) { return soft(v, t); });
}

Vec prox_tv1d(const Vec& x, double t, int iters, double rho) {
  if (x.size() < 2) throw ShapeError("TV1D prox needs at least 2 entries");
  const Eigen::Index n = x.size();
  const TridiagonalSolver solver(n, t, rho);
  Vec y = x;
  Vec z = diff1d(x);
  Vec u = Vec::Zero(n - 1);
  const Vec scaled_x = x / t;
  for (int k = 0; k < iters; ++k) {
    y = solver.solve(scaled_x + rho * diff1d_adjoint(z - u, n));
    const Vec dy = diff1d(y);
    z = (dy + u).unaryExpr([rho](double v) { return soft(v, 1.0 / rho); });
    u += dy - z;
  }
  return y;
}

Vec prox_tv2d(const Vec& x, int height, int width, double t, int iters, double rho, int cg_iters,
              double cg_tol) {
  check_image(x, height, width);
  if (height < 2 || width < 2) throw ShapeError("TV2D prox needs height, width >= 2");
  const Grid grid{height, width};
  auto apply_system = [&](const Vec& v) -> Vec { return v / t + rho * grid.adjoint(grid.apply(v)); };

  Vec y = x;
  Vec z = grid.apply(x);
  Vec u = Vec::Zero(grid.size());
  const Vec scaled_x = x / t;
  for (int k = 0; k < iters; ++k) {
    const Vec rhs = scaled_x + rho * grid.adjoint(z - u);
    // Conjugate gradients warm-started from the previous y.
    Vec r = rhs - apply_system(y);
    Vec p = r;
    double rr = r.squaredNorm();
    for (int it = 0; it < cg_iters && std::sqrt(rr) > cg_tol; ++it) {
      const Vec ap = apply_system(p);
      const double step = rr / p.dot(ap);
      y += step * p;
      r -= step * ap;
      const double rr_next = r.squaredNorm();
      p = r + (rr_next / rr) * p;
      rr = rr_next;
    }
    const Vec dy = grid.apply(y);
    z = (dy + u).unaryExpr([rho](double v) { return soft(v, 1.0 / rho); });
    u += dy - z;
  }
  return y;
}

Vec prox(const Regularizer& g, const Vec& x, double t) {
  switch (g.kind) {
    case RegKind::L1:
      return prox_l1(x, t);
    case RegKind::TV1D:
      return prox_tv1d(x, t, g.admm_iters, g.admm_rho);
    case RegKind::TV2D:
      return prox_tv2d(x, g.height, g.width, t, g.admm_iters, g.admm_rho, g.cg_iters, g.cg_tol);
  }
  return x;
}

double envelope_value(const Regularizer& g, const Vec& x, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("envelope scale lambda must be positive");
  const Vec p = prox(g, x, lambda);
  return reg_value(g, p) + (x - p).squaredNorm() / (2.0 * lambda);
}

Vec envelope_grad(const Regularizer& g, const Vec& x, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("envelope scale lambda must be positive");
  return (x - prox(g, x, lambda)) / lambda;
}

Mat prox_columns(const Regularizer& g, const Mat& xs, double t) {
  Mat out(xs.rows(), xs.cols());
  if (g.kind == RegKind::L1) {
    out = xs.unaryExpr([t](double v) { return soft(v, t); });
    return out;
  }
  parallel_for(static_cast<std::size_t>(xs.cols()), [&](std::size_t j) {
    const auto col = static_cast<Eigen::Index>(j);
    out.col(col) = prox(g, xs.col(col), t);
  });
  return out;
}

}  // namespace myvt
