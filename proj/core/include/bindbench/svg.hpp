#pragma once

#include <optional>
#include <string>
#include <vector>

namespace bindbench {

struct ChartPoint {
  double x = 0;
  double y = 0;
  double lo = 0;  // error bar bottom
  double hi = 0;  // error bar top
};

struct ChartSeries {
  std::string name;
  std::vector<ChartPoint> points;  // drawn in x order
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::optional<double> y_min;  // axis bounds; derived from the data when unset
  std::optional<double> y_max;
  int width = 720;
  int height = 480;
};

// Line chart with error bars and a legend. Identical input gives identical bytes.
std::string line_chart_svg(const ChartSpec& spec, const std::vector<ChartSeries>& series);

// Escapes &, <, >, " and ' for SVG text and attributes.
std::string xml_escape(std::string_view text);

}  // namespace bindbench
