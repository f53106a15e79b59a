#include "georob/svg.hpp"

#include "georob/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

namespace georob::svg {

namespace {

constexpr double kWidth = 640, kHeight = 420, kMargin = 56;
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double span() const { return hi > lo ? hi - lo : 1.0; }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string esc(const std::string& text) {
  std::string out;
  for (char c : text) {
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

std::ofstream open(const std::string& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return out;
}

void axes(std::ofstream& out, const Range& x, const Range& y, const std::string& xl,
          const std::string& yl, const std::string& title) {
  out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
      << "</text>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">" << esc(xl)
      << "</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" transform=\"rotate(-90 14 " << kHeight / 2
      << ")\" text-anchor=\"middle\">" << esc(yl) << "</text>\n";
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 14 << "\">" << num(x.lo) << "</text>\n";
  out << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 14
      << "\" text-anchor=\"end\">" << num(x.hi) << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">"
      << num(y.lo) << "</text>\n";
  out << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 8 << "\" text-anchor=\"end\">"
      << num(y.hi) << "</text>\n";
}

}  // namespace

void line_plot(const Table& data, const std::string& x_column, const std::string& y_column,
               const std::string& group_column, const std::string& title, const std::string& path) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  Range xr, yr;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double x = data.number(r, x_column);
    const double y = data.number(r, y_column);
    if (!std::isfinite(x) || !std::isfinite(y)) continue;
    xr.add(x);
    yr.add(y);
    series[group_column.empty() ? y_column : data.text(r, group_column)].emplace_back(x, y);
  }
  auto out = open(path);
  axes(out, xr, yr, x_column, y_column, title);
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  std::size_t color = 0;
  for (auto& [name, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* c = kPalette[color % 10];
    out << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& [x, y] : pts)
      out << kMargin + pw * (x - xr.lo) / xr.span() << ',' << kMargin + ph * (1.0 - (y - yr.lo) / yr.span())
          << ' ';
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << kMargin + 14 * (color + 1) << "\" fill=\""
        << c << "\">" << esc(group_column.empty() ? name : group_column + "=" + name) << "</text>\n";
    ++color;
  }
  out << "</svg>\n";
}

void heatmap(const Table& data, const std::string& x_column, const std::string& y_column,
             const std::string& value_column, const std::string& title, const std::string& path) {
  std::set<double> xs, ys;
  Range xr, yr, vr;
  for (std::size_t r = 0; r < data.size(); ++r) {
    xs.insert(data.number(r, x_column));
    ys.insert(data.number(r, y_column));
    vr.add(data.number(r, value_column));
  }
  for (double x : xs) xr.add(x);
  for (double y : ys) yr.add(y);
  auto out = open(path);
  axes(out, xr, yr, x_column, y_column, title + " (" + value_column + ")");
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  const double cw = pw / static_cast<double>(std::max<std::size_t>(xs.size(), 1));
  const double ch = ph / static_cast<double>(std::max<std::size_t>(ys.size(), 1));
  const std::vector<double> xv(xs.begin(), xs.end()), yv(ys.begin(), ys.end());
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto xi = std::lower_bound(xv.begin(), xv.end(), data.number(r, x_column)) - xv.begin();
    const auto yi = std::lower_bound(yv.begin(), yv.end(), data.number(r, y_column)) - yv.begin();
    const double t = (data.number(r, value_column) - vr.lo) / vr.span();
    const int red = static_cast<int>(std::lround(255 * t));
    const int blue = 255 - red;
    out << "<rect x=\"" << kMargin + cw * static_cast<double>(xi) << "\" y=\""
        << kMargin + ph - ch * static_cast<double>(yi + 1) << "\" width=\"" << cw + 0.5 << "\" height=\""
        << ch + 0.5 << "\" fill=\"rgb(" << red << ",60," << blue << ")\"/>\n";
  }
  out << "</svg>\n";
}

}  // namespace georob::svg
