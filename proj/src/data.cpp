#include "myvt/data.hpp"

#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "myvt/rng.hpp"

namespace myvt {

SyntheticCase synthetic_case_from_string(const std::string& name) {
  if (name == "sparse") return SyntheticCase::Sparse;
  if (name == "pwc" || name == "piecewise_constant") return SyntheticCase::PiecewiseConstant;
  throw std::invalid_argument("unknown case '" + name + "' (expected sparse or pwc)");
}

std::string to_string(SyntheticCase c) { return c == SyntheticCase::Sparse ? "sparse" : "pwc"; }

void SyntheticSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be positive");
  if (n_examples < 1) throw std::invalid_argument("n_examples must be positive");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise_std must be nonnegative");
  if (kind == SyntheticCase::Sparse && (sparsity < 0 || sparsity > dim))
    throw std::invalid_argument("sparsity must lie in [0, dim]");
  if (kind == SyntheticCase::PiecewiseConstant && (n_segments < 1 || n_segments > dim))
    throw std::invalid_argument("n_segments must lie in [1, dim]");
  if (!(amplitude_low <= amplitude_high))
    throw std::invalid_argument("amplitude_low must not exceed amplitude_high");
}

namespace {

Vec draw_truth(const SyntheticSpec& spec, Rng& rng) {
  spec.validate();
  Vec z = Vec::Zero(spec.dim);
  if (spec.kind == SyntheticCase::Sparse) {
    std::vector<int> index(spec.dim);
    std::iota(index.begin(), index.end(), 0);
    // Partial Fisher-Yates: the first `sparsity` slots end up a uniform subset.
    for (int i = 0; i < spec.sparsity; ++i) {
      const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.dim - i)));
      std::swap(index[i], index[j]);
      z[index[i]] = rng.uniform(spec.amplitude_low, spec.amplitude_high);
    }
    return z;
  }
  for (int s = 0; s < spec.n_segments; ++s) {
    const int begin = static_cast<int>(static_cast<long>(s) * spec.dim / spec.n_segments);
    const int end = static_cast<int>(static_cast<long>(s + 1) * spec.dim / spec.n_segments);
    z.segment(begin, end - begin).setConstant(rng.uniform(spec.amplitude_low, spec.amplitude_high));
  }
  return z;
}

}  // namespace

Vec make_truth(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  return draw_truth(spec, rng);
}

Dataset make_dataset(const SyntheticSpec& spec) {
  Rng rng(spec.seed);
  Dataset data;
  data.truth = draw_truth(spec, rng);
  data.examples.resize(spec.n_examples, spec.dim);
  for (int i = 0; i < spec.n_examples; ++i) {
    for (int j = 0; j < spec.dim; ++j) data.examples(i, j) = data.truth[j] + spec.noise_std * rng.normal();
  }
  return data;
}

std::string describe(const SyntheticSpec& spec) {
  std::ostringstream os;
  os << "case=" << to_string(spec.kind) << " dim=" << spec.dim << " n_examples=" << spec.n_examples
     << " noise_std=" << format_double(spec.noise_std);
  if (spec.kind == SyntheticCase::Sparse)
    os << " sparsity=" << spec.sparsity;
  else
    os << " n_segments=" << spec.n_segments;
  os << " amplitude_low=" << format_double(spec.amplitude_low)
     << " amplitude_high=" << format_double(spec.amplitude_high) << " seed=" << spec.seed;
  return os.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

void write_row(std::ostream& os, const auto& row) {
  for (Eigen::Index j = 0; j < row.size(); ++j) {
    if (j > 0) os << ',';
    os << format_double(row[j]);
  }
  os << '\n';
}

Vec parse_row(const std::string& line, std::size_t line_no) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t end = line.find(',', pos);
    if (end == std::string::npos) end = line.size();
    std::size_t a = pos;
    std::size_t b = end;
    while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
    while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t' || line[b - 1] == '\r')) --b;
    double v = 0.0;
    const auto res = std::from_chars(line.data() + a, line.data() + b, v);
    if (a == b || res.ec != std::errc() || res.ptr != line.data() + b)
      throw std::runtime_error("line " + std::to_string(line_no) + ": malformed number '" +
                               line.substr(a, b - a) + "'");
    values.push_back(v);
    pos = end + 1;
  }
  return Eigen::Map<const Vec>(values.data(), static_cast<Eigen::Index>(values.size()));
}

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

void write_dataset(std::ostream& os, const Dataset& data, const std::string& metadata) {
  os << "# truth";
  if (!metadata.empty()) os << ' ' << metadata;
  os << '\n';
  write_row(os, data.truth);
  os << "# examples\n";
  for (Eigen::Index i = 0; i < data.examples.rows(); ++i) write_row(os, data.examples.row(i));
}

void write_dataset(const std::string& path, const Dataset& data, const std::string& metadata) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write dataset: " + path);
  write_dataset(os, data, metadata);
}

Dataset read_dataset(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(is, line)) {
      ++line_no;
      if (!is_blank(line)) return true;
    }
    return false;
  };
  if (!next_line() || line.rfind("# truth", 0) != 0)
    throw std::runtime_error("dataset must start with '# truth'");
  if (!next_line()) throw std::runtime_error("dataset is missing the truth row");
  Dataset data;
  data.truth = parse_row(line, line_no);
  if (!next_line() || line.rfind("# examples", 0) != 0)
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected '# examples'");
  std::vector<Vec> rows;
  while (next_line()) {
    Vec row = parse_row(line, line_no);
    if (row.size() != data.truth.size())
      throw std::runtime_error("line " + std::to_string(line_no) + ": example has " +
                               std::to_string(row.size()) + " entries, truth has " +
                               std::to_string(data.truth.size()));
    rows.push_back(std::move(row));
  }
  data.examples.resize(static_cast<Eigen::Index>(rows.size()), data.truth.size());
  for (std::size_t i = 0; i < rows.size(); ++i) data.examples.row(static_cast<Eigen::Index>(i)) = rows[i];
  return data;
}

Dataset read_dataset(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open dataset: " + path);
  return read_dataset(is);
}

std::vector<Vec> read_vectors(std::istream& is) {
  std::vector<Vec> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    rows.push_back(parse_row(line, line_no));
  }
  return rows;
}

void write_vectors(std::ostream& os, const std::vector<Vec>& rows) {
  for (const auto& r : rows) write_row(os, r);
}

}  // namespace myvt
