#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lrp/harness.hpp"

namespace lrp {

namespace {

constexpr double kWidth = 720, kHeight = 480;
constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

struct Axis {
  bool log = true;
  double lo = 0, hi = 1;  // in transformed units
  double pixel_lo = 0, pixel_hi = 1;

  double forward(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }
  double map(double v) const { return pixel_lo + (forward(v) - lo) / (hi - lo) * (pixel_hi - pixel_lo); }

  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const int a = static_cast<int>(std::floor(lo)), b = static_cast<int>(std::ceil(hi));
      const int step = std::max(1, (b - a) / 8);
      for (int k = a; k <= b; k += step)
        if (k >= lo - 1e-9 && k <= hi + 1e-9) t.push_back(std::pow(10.0, k));
      return t;
    }
    const double span = hi - lo;
    const double raw = span / 6;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) t.push_back(v);
    return t;
  }
};

void fit_range(Axis& ax, const std::vector<double>& values) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values) {
    if (!ax.usable(v)) continue;
    lo = std::min(lo, ax.forward(v));
    hi = std::max(hi, ax.forward(v));
  }
  if (!(lo <= hi)) throw std::invalid_argument("render_svg: no plottable values");
  if (hi - lo < 1e-12) {
    lo -= ax.log ? 0.5 : std::max(1.0, std::abs(lo)) * 0.1;
    hi += ax.log ? 0.5 : std::max(1.0, std::abs(hi)) * 0.1;
  }
  const double pad = 0.04 * (hi - lo);
  ax.lo = lo - pad;
  ax.hi = hi + pad;
}

}  // namespace

std::string render_svg(const PlotSpec& plot) {
  Axis ax{plot.log_x}, ay{plot.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : plot.series) {
    if (s.x.size() != s.y.size() || (!s.err.empty() && s.err.size() != s.y.size()))
      throw std::invalid_argument("render_svg: series '" + s.label + "' has mismatched lengths");
    xs.insert(xs.end(), s.x.begin(), s.x.end());
    for (std::size_t i = 0; i < s.y.size(); ++i) {
      ys.push_back(s.y[i]);
      if (!s.err.empty()) {
        ys.push_back(s.y[i] + s.err[i]);
        if (!ay.log || s.y[i] - s.err[i] > 0) ys.push_back(s.y[i] - s.err[i]);
      }
    }
  }
  fit_range(ax, xs);
  fit_range(ay, ys);
  ax.pixel_lo = kLeft;
  ax.pixel_hi = kWidth - kRight;
  ay.pixel_lo = kHeight - kBottom;
  ay.pixel_hi = kTop;

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(plot.title)
    << "</text>\n";
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << ax.pixel_hi - kLeft << "\" height=\""
    << ay.pixel_lo - kTop << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double px = ax.map(t);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << ay.pixel_lo << "\" x2=\"" << num(px) << "\" y2=\""
      << ay.pixel_lo + 5 << "\" stroke=\"black\"/>";
    o << "<text x=\"" << num(px) << "\" y=\"" << ay.pixel_lo + 18 << "\" text-anchor=\"middle\">" << num(t)
      << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double py = ay.map(t);
    o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << kLeft << "\" y2=\"" << num(py)
      << "\" stroke=\"black\"/>";
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << num(t)
      << "</text>\n";
  }
  const std::string xl = escape(plot.x_label) + (plot.log_x ? " (log scale)" : "");
  const std::string yl = escape(plot.y_label) + (plot.log_y ? " (log scale)" : "");
  o << "<text x=\"" << (kLeft + ax.pixel_hi) / 2 << "\" y=\"" << kHeight - 18 << "\" text-anchor=\"middle\">" << xl
    << "</text>\n";
  o << "<text transform=\"translate(18," << (kTop + ay.pixel_lo) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << yl << "</text>\n";

  int index = 0;
  for (const auto& s : plot.series) {
    const char* color = kColors[index % (sizeof kColors / sizeof kColors[0])];
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) keep.push_back(i);
    if (s.err.empty()) {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" stroke-dasharray=\"6 3\" points=\"";
      for (std::size_t i : keep) o << num(ax.map(s.x[i])) << ',' << num(ay.map(s.y[i])) << ' ';
      o << "\"/>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
      for (std::size_t i : keep) o << num(ax.map(s.x[i])) << ',' << num(ay.map(s.y[i])) << ' ';
      o << "\"/>\n";
      for (std::size_t i : keep) {
        const double px = ax.map(s.x[i]);
        const double top = s.y[i] + s.err[i];
        double bottom = s.y[i] - s.err[i];
        if (ay.log && !(bottom > 0)) bottom = std::pow(10.0, ay.lo);
        o << "<line x1=\"" << num(px) << "\" y1=\"" << num(ay.map(bottom)) << "\" x2=\"" << num(px) << "\" y2=\""
          << num(ay.map(top)) << "\" stroke=\"" << color << "\"/>";
        o << "<circle cx=\"" << num(px) << "\" cy=\"" << num(ay.map(s.y[i])) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
      }
    }
    const double ly = kTop + 16 + 18 * index;
    o << "<line x1=\"" << ax.pixel_hi + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ax.pixel_hi + 32 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\""
      << (s.err.empty() ? " stroke-dasharray=\"6 3\"" : "") << "/>";
    o << "<text x=\"" << ax.pixel_hi + 36 << "\" y=\"" << ly << "\">" << escape(s.label) << "</text>\n";
    ++index;
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const std::string& path, const PlotSpec& plot) {
  const std::string svg = render_svg(plot);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg;
}

}  // namespace lrp
