#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace myvt {

/// Seeded random stream shared by data generation, initialization and training.
///
/// Bits come from std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Uniforms take the top 53 bits; Gaussians use the Box-Muller
/// transform (both values of each pair are consumed). Neither step goes through
/// the implementation-defined std::*_distribution classes, so identical seeds
/// give identical streams on every conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index n);
  /// rows x cols matrix of independent standard normals, filled column by column.
  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

  /// Independent child stream; advances this stream by one draw.
  Rng split() { return Rng(next_u64()); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace myvt
