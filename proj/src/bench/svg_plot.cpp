#include "avlab/bench/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "avlab/common/error.hpp"

namespace avlab {

namespace {

std::vector<std::string> cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string c;
  while (std::getline(in, c, ',')) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

std::string num(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

/// Round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
  return out;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

}  // namespace

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::ParseError, "no column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const auto& s = rows.at(row).at(col);
  double x = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw Error(ErrorKind::ParseError, "not a number in CSV: '" + s + "'");
  return x;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::stringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "empty CSV");
  t.header = cells(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto row = cells(line);
    if (row.size() != t.header.size()) throw Error(ErrorKind::ParseError, "CSV row width differs from header");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string render_svg(const std::string& csv_text, const PlotSpec& spec) {
  const CsvTable t = parse_csv(csv_text);
  const auto cx = t.column(spec.x_column), cy = t.column(spec.y_column);
  const auto cs = spec.series_column.empty() ? std::size_t(-1) : t.column(spec.series_column);

  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    double x = t.number(r, cx);
    const double y = t.number(r, cy);
    if (spec.log_x) {
      if (!(x > 0)) continue;
      x = std::log10(x);
    }
    series[cs == std::size_t(-1) ? "" : t.rows[r][cs]].emplace_back(x, y);
  }

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    for (const auto& [x, y] : pts) {
      if (first) x0 = x1 = x, y0 = y1 = y, first = false;
      x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
  }
  if (spec.reference) y0 = std::min(y0, *spec.reference), y1 = std::max(y1, *spec.reference);
  y0 = std::min(y0, 0.0);
  if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-12) y1 = y0 + 1.0;
  y1 += 0.05 * (y1 - y0);

  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = spec.width - left - right, ph = spec.height - top - bottom;
  auto X = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto Y = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << spec.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(spec.title)
    << "</text>\n";
  s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double tx : ticks(x0, x1)) {
    s << "<line x1=\"" << X(tx) << "\" y1=\"" << top + ph << "\" x2=\"" << X(tx) << "\" y2=\"" << top + ph + 5
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << X(tx) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
      << (spec.log_x ? num(std::pow(10.0, tx)) : num(tx)) << "</text>\n";
  }
  for (double ty : ticks(y0, y1)) {
    s << "<line x1=\"" << left - 5 << "\" y1=\"" << Y(ty) << "\" x2=\"" << left << "\" y2=\"" << Y(ty)
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << left - 8 << "\" y=\"" << Y(ty) + 4 << "\" text-anchor=\"end\">" << num(ty) << "</text>\n";
  }
  s << "<text x=\"" << left + pw / 2 << "\" y=\"" << spec.height - 12 << "\" text-anchor=\"middle\">"
    << esc(spec.x_label) << "</text>\n";
  s << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << esc(spec.y_label) << "</text>\n";
  if (spec.reference)
    s << "<line x1=\"" << left << "\" y1=\"" << Y(*spec.reference) << "\" x2=\"" << left + pw << "\" y2=\""
      << Y(*spec.reference) << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";

  int i = 0;
  for (const auto& [name, pts] : series) {
    const char* color = kColors[i % 8];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : pts) s << X(x) << ',' << Y(y) << ' ';
    s << "\"/>\n";
    for (const auto& [x, y] : pts)
      s << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = top + 10 + 18 * i;
    s << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly + 4 << "\">"
      << esc((spec.series_column.empty() ? "" : spec.series_column + " = ") + name) << "</text>\n";
    ++i;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace avlab
