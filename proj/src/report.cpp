#include "cusplab/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace cusplab::report {

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
     << escape(title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    os << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << xv << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << yv << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
     << "font-size=\"12\">" << escape(x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
     << "transform=\"rotate(-90 16 " << H / 2 << ")\">" << escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& s = series[i];
    const char* colour = kPalette[i % (sizeof kPalette / sizeof kPalette[0])];
    os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.2\" points=\"";
    for (std::size_t k = 0; k < s.points.size(); ++k) {
      if (s.steps && k > 0) os << px(s.points[k].first) << ',' << py(s.points[k - 1].second) << ' ';
      os << px(s.points[k].first) << ',' << py(s.points[k].second) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << L + 8 << "\" y=\"" << T + 14 + 14 * static_cast<double>(i) << "\" fill=\"" << colour
       << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

Series step_series(const std::string& label, const paths::StepPath& p) {
  Series s;
  s.label = label;
  s.steps = true;
  // Thin very long paths to keep the SVG small; extremes per bucket are kept.
  const std::size_t budget = 4000;
  s.points.emplace_back(p.a, p.values.front());
  if (p.times.size() <= budget) {
    for (std::size_t i = 0; i < p.times.size(); ++i) s.points.emplace_back(p.times[i], p.values[i + 1]);
  } else {
    const std::size_t stride = p.times.size() / (budget / 2) + 1;
    for (std::size_t i = 0; i < p.times.size(); i += stride) {
      const std::size_t end = std::min(p.times.size(), i + stride);
      std::size_t lo = i, hi = i;
      for (std::size_t k = i; k < end; ++k) {
        if (p.values[k + 1] < p.values[lo + 1]) lo = k;
        if (p.values[k + 1] > p.values[hi + 1]) hi = k;
      }
      const std::size_t first = std::min(lo, hi), second = std::max(lo, hi);
      s.points.emplace_back(p.times[first], p.values[first + 1]);
      if (second != first) s.points.emplace_back(p.times[second], p.values[second + 1]);
    }
  }
  s.points.emplace_back(p.b, p.values.back());
  return s;
}

}  // namespace cusplab::report
