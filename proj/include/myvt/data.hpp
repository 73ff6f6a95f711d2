#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace myvt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class SyntheticCase { Sparse, PiecewiseConstant };

SyntheticCase synthetic_case_from_string(const std::string& name);
std::string to_string(SyntheticCase c);

struct SyntheticSpec {
  SyntheticCase kind = SyntheticCase::Sparse;
  int dim = 100;
  int n_examples = 500;
  double noise_std = 0.2;  // variance 0.04
  int sparsity = 5;        // Sparse: number of nonzeros
  int n_segments = 5;      // PiecewiseConstant: number of constant blocks
  double amplitude_low = -2.0;
  double amplitude_high = 2.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Noisy observations of a structured truth vector. Examples are stored one per row.
struct Dataset {
  Vec truth;
  Mat examples;  // n_examples x dim
};

/// Sparse: `sparsity` positions chosen without replacement, values uniform in the
/// amplitude range. PiecewiseConstant: `n_segments` contiguous blocks of
/// near-equal length, each at a uniform level.
Vec make_truth(const SyntheticSpec& spec);

/// examples[i] = truth + noise_std * N(0, I); shares the seeded stream with make_truth.
Dataset make_dataset(const SyntheticSpec& spec);

/// Dataset file: "# truth" line (optionally followed by key=value metadata), the
/// truth row, "# examples", then one comma-separated row per example.
void write_dataset(std::ostream& os, const Dataset& data, const std::string& metadata = "");
void write_dataset(const std::string& path, const Dataset& data, const std::string& metadata = "");
Dataset read_dataset(std::istream& is);
Dataset read_dataset(const std::string& path);

std::string describe(const SyntheticSpec& spec);

/// One vector per line, comma-separated decimals. Blank lines are skipped.
std::vector<Vec> read_vectors(std::istream& is);
void write_vectors(std::ostream& os, const std::vector<Vec>& rows);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

}  // namespace myvt
