#include "bindbench/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace bindbench {
namespace {

constexpr const char* kSeriesColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

// Heckbert's nice numbers.
double nice(double range, bool round) {
  double exponent = std::floor(std::log10(range));
  double fraction = range / std::pow(10.0, exponent);
  double f;
  if (round) {
    f = fraction < 1.5 ? 1 : fraction < 3 ? 2 : fraction < 7 ? 5 : 10;
  } else {
    f = fraction <= 1 ? 1 : fraction <= 2 ? 2 : fraction <= 5 ? 5 : 10;
  }
  return f * std::pow(10.0, exponent);
}

struct Axis {
  double lo;
  double hi;
  double step;
};

Axis nice_axis(double lo, double hi, int ticks = 5) {
  if (!(hi > lo)) {
    double pad = lo == 0 ? 1 : std::abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  double step = nice(nice(hi - lo, false) / (ticks - 1), true);
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

std::string num(double v) {
  if (std::abs(v) < 1e-12) v = 0;
  std::string s = fmt::format("{:.2f}", v);
  return s;
}

std::string tick_label(double v, double step) {
  if (std::abs(v) < step * 1e-9) v = 0;
  int decimals = step >= 1 ? 0 : static_cast<int>(std::ceil(-std::log10(step) - 1e-9));
  return fmt::format("{:.{}f}", v, decimals);
}

}  // namespace

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string line_chart_svg(const ChartSpec& spec, const std::vector<ChartSeries>& series) {
  const double left = 70, right = 190, top = 40, bottom = 60;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min({ymin, p.y, p.lo});
      ymax = std::max({ymax, p.y, p.hi});
    }
  }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  if (spec.y_min) ymin = *spec.y_min;
  if (spec.y_max) ymax = *spec.y_max;
  Axis xa = nice_axis(xmin, xmax);
  Axis ya = nice_axis(ymin, ymax);
  if (spec.y_min) ya.lo = *spec.y_min;
  if (spec.y_max) ya.hi = *spec.y_max;

  auto sx = [&](double x) { return left + (x - xa.lo) / (xa.hi - xa.lo) * pw; };
  auto sy = [&](double y) { return top + ph - (y - ya.lo) / (ya.hi - ya.lo) * ph; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      spec.width, spec.height, spec.width, spec.height);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", spec.width, spec.height);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n", num(left + pw / 2),
                     xml_escape(spec.title));

  // Grid and ticks.
  out += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double y = ya.lo; y <= ya.hi + ya.step * 1e-9; y += ya.step) {
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n", num(left), num(sy(y)), num(left + pw), num(sy(y)));
  }
  out += "</g>\n<g text-anchor=\"end\">\n";
  for (double y = ya.lo; y <= ya.hi + ya.step * 1e-9; y += ya.step) {
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(left - 6), num(sy(y) + 4), tick_label(y, ya.step));
  }
  out += "</g>\n<g text-anchor=\"middle\">\n";
  for (double x = xa.lo; x <= xa.hi + xa.step * 1e-9; x += xa.step) {
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(sx(x)), num(top + ph + 18), tick_label(x, xa.step));
  }
  out += "</g>\n";
  out += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", num(left),
                     num(top), num(pw), num(ph));
  out += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", num(left + pw / 2),
                     num(spec.height - 16), xml_escape(spec.x_label));
  out += fmt::format("<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
                     num(top + ph / 2), num(top + ph / 2), xml_escape(spec.y_label));

  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kSeriesColors[i % std::size(kSeriesColors)];
    std::vector<ChartPoint> pts = series[i].points;
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
    out += fmt::format("<g class=\"series\" data-name=\"{}\" stroke=\"{}\" fill=\"{}\">\n", xml_escape(series[i].name),
                       color, color);
    if (pts.size() > 1) {
      std::string path;
      for (const auto& p : pts) path += fmt::format("{}{},{}", path.empty() ? "" : " ", num(sx(p.x)), num(sy(p.y)));
      out += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke-width=\"2\"/>\n", path);
    }
    for (const auto& p : pts) {
      double x = sx(p.x);
      out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke-width=\"1.5\"/>\n", num(x), num(sy(p.lo)),
                         num(sy(p.hi)));
      out += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke-width=\"1.5\"/>\n", num(x - 4), num(x + 4),
                         num(sy(p.lo)));
      out += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke-width=\"1.5\"/>\n", num(x - 4), num(x + 4),
                         num(sy(p.hi)));
      out += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" data-x=\"{}\" data-y=\"{:.6f}\"/>\n", num(x), num(sy(p.y)),
                         tick_label(p.x, 1e-6), p.y);
    }
    out += "</g>\n";
    double ly = top + 10 + 20 * static_cast<double>(i);
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                       num(left + pw + 14), num(ly), num(left + pw + 38), num(ly), color);
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", num(left + pw + 44), num(ly + 4),
                       xml_escape(series[i].name));
  }
  out += "</svg>\n";
  return out;
}

}  // namespace bindbench
