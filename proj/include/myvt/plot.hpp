#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "myvt/train.hpp"

namespace myvt {

/// Malformed metrics CSV; `line()` is 1-based.
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t line) : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Parses a metrics CSV written by write_metrics_header/write_metrics_row.
std::vector<MetricsRow> read_metrics_csv(std::istream& is);
std::vector<MetricsRow> read_metrics_csv(const std::string& path);

struct MetricsSeries {
  std::string label;
  std::vector<MetricsRow> rows;
};

enum class NormColumn { L1, TV };

/// Two-panel SVG: MSE on the left, the chosen norm on the right, one polyline
/// per series and a legend naming each series. Output depends only on the input.
std::string render_metrics_svg(const std::vector<MetricsSeries>& series, NormColumn norm);

}  // namespace myvt
