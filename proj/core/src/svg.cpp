#include "adkyle/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>


namespace adkyle {

namespace {

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

std::string fmt(double v) {
  // Two decimals are plenty for pixel coordinates.
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os.precision(4);
  os << (std::abs(v) < 1e-12 ? 0.0 : v);
  return os.str();
}

// Roughly five round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step) out.push_back(t);
  return out;
}

const char* kColors[] = {"#1f4e79", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#2e4053"};

}  // namespace

std::string render_svg(const SvgChart& chart) {
  const double left = 70, right = 20, top = 40, bottom = 55;
  const double w = chart.width - left - right;
  const double h = chart.height - top - bottom;

  double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
  double ylo = xlo, yhi = -xlo;
  for (const auto& s : chart.series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
      xlo = std::min(xlo, s.x[k]);
      xhi = std::max(xhi, s.x[k]);
      ylo = std::min(ylo, s.y[k]);
      yhi = std::max(yhi, s.y[k]);
    }
  }
  if (!std::isfinite(xlo)) xlo = 0, xhi = 1, ylo = 0, yhi = 1;
  if (xhi - xlo <= 0) xhi = xlo + 1;
  if (yhi - ylo <= 0) {
    const double pad = std::max(std::abs(ylo) * 0.05, 1e-3);
    ylo -= pad;
    yhi += pad;
  } else {
    const double pad = 0.05 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  auto px = [&](double x) { return left + (x - xlo) / (xhi - xlo) * w; };
  auto py = [&](double y) { return top + (yhi - y) / (yhi - ylo) * h; };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
     << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << fmt(left + w / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << escape(chart.title) << "</text>\n"
     << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(xlo, xhi)) {
    os << "<line x1=\"" << fmt(px(t)) << "\" y1=\"" << fmt(top + h) << "\" x2=\"" << fmt(px(t)) << "\" y2=\""
       << fmt(top + h + 5) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << fmt(px(t)) << "\" y=\"" << fmt(top + h + 18) << "\" text-anchor=\"middle\">"
       << tick_label(t) << "</text>\n";
  }
  for (double t : ticks(ylo, yhi)) {
    os << "<line x1=\"" << fmt(left - 5) << "\" y1=\"" << fmt(py(t)) << "\" x2=\"" << fmt(left) << "\" y2=\""
       << fmt(py(t)) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << fmt(left - 8) << "\" y=\"" << fmt(py(t) + 4) << "\" text-anchor=\"end\">"
       << tick_label(t) << "</text>\n";
  }
  os << "<text x=\"" << fmt(left + w / 2) << "\" y=\"" << fmt(chart.height - 12.0)
     << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << fmt(top + h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << fmt(top + h / 2) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const auto& ser = chart.series[s];
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (!ser.dash.empty()) os << " stroke-dasharray=\"" << escape(ser.dash) << "\"";
    os << " points=\"";
    bool first = true;
    for (std::size_t k = 0; k < ser.x.size() && k < ser.y.size(); ++k) {
      if (!std::isfinite(ser.x[k]) || !std::isfinite(ser.y[k])) continue;
      if (!first) os << ' ';
      first = false;
      os << fmt(px(ser.x[k])) << ',' << fmt(py(ser.y[k]));
    }
    os << "\"/>\n";
    if (!ser.label.empty()) {
      const double ly = top + 16 + 16 * static_cast<double>(s);
      os << "<line x1=\"" << fmt(left + w - 130) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(left + w - 105)
         << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
      if (!ser.dash.empty()) os << " stroke-dasharray=\"" << escape(ser.dash) << "\"";
      os << "/>\n<text x=\"" << fmt(left + w - 100) << "\" y=\"" << fmt(ly) << "\">" << escape(ser.label)
         << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace adkyle
