#include "myvt/plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace myvt {

namespace {

constexpr const char* kHeader = "iter,mse,avg_l1,avg_tv,dual_obj,wall_ms";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto end = line.find(',', pos);
    out.push_back(line.substr(pos, end == std::string::npos ? std::string::npos : end - pos));
    if (end == std::string::npos) break;
    pos = end + 1;
  }
  return out;
}

double parse_field(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw CsvError("line " + std::to_string(line) + ": malformed number '" + s + "'", line);
  return v;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Tick label with magnitude-appropriate precision.
std::string tick_label(double v) {
  const double a = std::abs(v);
  if (a != 0.0 && (a < 1e-2 || a >= 1e5)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1e", v);
    return buf;
  }
  return fixed(v, a < 1.0 ? 3 : (a < 100.0 ? 2 : 0));
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

struct Panel {
  double left;
  double top;
  double width;
  double height;
};

void draw_panel(std::ostringstream& svg, const Panel& p, const std::string& title,
                const std::vector<MetricsSeries>& series, double (*value)(const MetricsRow&)) {
  double xmax = 1.0;
  double ymin = 0.0;
  double ymax = 1.0;
  bool any = false;
  for (const auto& s : series) {
    for (const auto& r : s.rows) {
      const double y = value(r);
      xmax = std::max(xmax, static_cast<double>(r.iteration));
      if (!any) {
        ymin = ymax = y;
        any = true;
      }
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (any) {
    ymin = std::min(ymin, 0.0);
    if (ymax <= ymin) ymax = ymin + 1.0;
  }
  auto px = [&](double x) { return p.left + p.width * x / xmax; };
  auto py = [&](double y) { return p.top + p.height * (1.0 - (y - ymin) / (ymax - ymin)); };

  svg << "<g class=\"panel\">\n";
  svg << "<text x=\"" << fixed(p.left + p.width / 2) << "\" y=\"" << fixed(p.top - 12)
      << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  svg << "<line x1=\"" << fixed(p.left) << "\" y1=\"" << fixed(p.top + p.height) << "\" x2=\""
      << fixed(p.left + p.width) << "\" y2=\"" << fixed(p.top + p.height) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << fixed(p.left) << "\" y1=\"" << fixed(p.top) << "\" x2=\"" << fixed(p.left)
      << "\" y2=\"" << fixed(p.top + p.height) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    const double xv = xmax * i / 4.0;
    svg << "<text x=\"" << fixed(p.left - 6) << "\" y=\"" << fixed(py(yv) + 4)
        << "\" text-anchor=\"end\" font-size=\"10\">" << tick_label(yv) << "</text>\n";
    svg << "<text x=\"" << fixed(px(xv)) << "\" y=\"" << fixed(p.top + p.height + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << fixed(xv, 0) << "</text>\n";
  }
  svg << "<text x=\"" << fixed(p.left + p.width / 2) << "\" y=\"" << fixed(p.top + p.height + 34)
      << "\" text-anchor=\"middle\" font-size=\"11\">iteration</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    if (series[k].rows.empty()) continue;
    svg << "<polyline fill=\"none\" stroke=\"" << kColors[k % 5] << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].rows.size(); ++i) {
      const auto& r = series[k].rows[i];
      if (i > 0) svg << ' ';
      svg << fixed(px(static_cast<double>(r.iteration))) << ',' << fixed(py(value(r)));
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n";
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(std::istream& is) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(is, line)) throw CsvError("line 1: missing header", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw CsvError("line 1: expected header '" + std::string(kHeader) + "'", 1);
  std::vector<MetricsRow> rows;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 6)
      throw CsvError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                         std::to_string(fields.size()),
                     line_no);
    MetricsRow r;
    r.iteration = static_cast<long>(parse_field(fields[0], line_no));
    r.mse = parse_field(fields[1], line_no);
    r.avg_l1 = parse_field(fields[2], line_no);
    r.avg_tv = parse_field(fields[3], line_no);
    r.dual_objective = parse_field(fields[4], line_no);
    r.wall_ms = parse_field(fields[5], line_no);
    rows.push_back(r);
  }
  return rows;
}

std::vector<MetricsRow> read_metrics_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CsvError("cannot open " + path, 0);
  return read_metrics_csv(is);
}

std::string render_metrics_svg(const std::vector<MetricsSeries>& series, NormColumn norm) {
  constexpr double kWidth = 960;
  constexpr double kHeight = 420;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  draw_panel(svg, {70, 50, 360, 280}, "MSE", series, [](const MetricsRow& r) { return r.mse; });
  if (norm == NormColumn::L1)
    draw_panel(svg, {550, 50, 360, 280}, "average l1 norm", series,
               [](const MetricsRow& r) { return r.avg_l1; });
  else
    draw_panel(svg, {550, 50, 360, 280}, "average TV semi-norm", series,
               [](const MetricsRow& r) { return r.avg_tv; });
  svg << "<g class=\"legend\">\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double x = 70 + 180.0 * static_cast<double>(k);
    svg << "<line x1=\"" << fixed(x) << "\" y1=\"400.00\" x2=\"" << fixed(x + 24)
        << "\" y2=\"400.00\" stroke=\"" << kColors[k % 5] << "\" stroke-width=\"3\"/>\n";
    svg << "<text x=\"" << fixed(x + 30) << "\" y=\"404.00\" font-size=\"12\">" << escape(series[k].label)
        << "</text>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

}  // namespace myvt
