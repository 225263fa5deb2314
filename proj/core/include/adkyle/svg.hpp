#pragma once

#include <string>
#include <vector>

namespace adkyle {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string dash;  // stroke-dasharray, empty for solid
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<SvgSeries> series;
  int width = 640;
  int height = 420;
};

/// Standalone SVG document with axes, ticks and a legend. Output depends
/// only on the chart contents.
std::string render_svg(const SvgChart& chart);

}  // namespace adkyle
