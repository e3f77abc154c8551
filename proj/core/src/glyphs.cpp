#include "bindbench/glyphs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "bindbench/catalog.hpp"
#include "bindbench/error.hpp"

namespace bindbench {
namespace {

constexpr double kPi = std::numbers::pi;

Contour oriented(Contour c, bool positive) {
  if ((contour_area(c) > 0) != positive) std::reverse(c.begin(), c.end());
  return c;
}

Contour regular(int sides, double r, double start_deg, Vec2 center = {0.5, 0.5}) {
  Contour c;
  for (int i = 0; i < sides; ++i) {
    double t = (start_deg + 360.0 * i / sides) * kPi / 180.0;
    c.push_back({center.x + r * std::cos(t), center.y + r * std::sin(t)});
  }
  return c;
}

Contour circle(Vec2 center, double r) { return regular(64, r, 0, center); }

Contour arc(Vec2 center, double r, double from_deg, double to_deg, int steps) {
  Contour c;
  for (int i = 0; i <= steps; ++i) {
    double t = (from_deg + (to_deg - from_deg) * i / steps) * kPi / 180.0;
    c.push_back({center.x + r * std::cos(t), center.y + r * std::sin(t)});
  }
  return c;
}

Glyph solid(Contour c) { return Glyph{{oriented(std::move(c), true)}}; }

Glyph ring(Vec2 center, double outer, double inner) {
  return Glyph{{oriented(circle(center, outer), true), oriented(circle(center, inner), false)}};
}

Contour star(int points, double outer, double inner) {
  Contour c;
  for (int i = 0; i < 2 * points; ++i) {
    double r = i % 2 == 0 ? outer : inner;
    double t = (-90.0 + 180.0 * i / points) * kPi / 180.0;
    c.push_back({0.5 + r * std::cos(t), 0.5 + r * std::sin(t)});
  }
  return c;
}

// Classic heart curve, fitted into [x0, x1] x [y0, y1]; `flip` points the lobes down.
Contour heart(double x0, double x1, double y0, double y1, bool flip) {
  Contour raw;
  for (int i = 0; i < 96; ++i) {
    double t = 2 * kPi * i / 96;
    double x = 16 * std::pow(std::sin(t), 3);
    double y = -(13 * std::cos(t) - 5 * std::cos(2 * t) - 2 * std::cos(3 * t) - std::cos(4 * t));
    raw.push_back({x, flip ? -y : y});
  }
  auto [mnx, mxx] = std::minmax_element(raw.begin(), raw.end(), [](Vec2 a, Vec2 b) { return a.x < b.x; });
  auto [mny, mxy] = std::minmax_element(raw.begin(), raw.end(), [](Vec2 a, Vec2 b) { return a.y < b.y; });
  double ax = mnx->x, bx = mxx->x, ay = mny->y, by = mxy->y;
  Contour c;
  for (Vec2 p : raw) c.push_back({x0 + (p.x - ax) / (bx - ax) * (x1 - x0), y0 + (p.y - ay) / (by - ay) * (y1 - y0)});
  return c;
}

// Boundary of a union of discs that is star-shaped around `origin`.
Contour disc_union(Vec2 origin, const std::vector<std::array<double, 3>>& discs) {
  Contour c;
  for (int i = 0; i < 128; ++i) {
    double t = 2 * kPi * i / 128;
    Vec2 d{std::cos(t), std::sin(t)};
    double reach = 0;
    for (const auto& [ox, oy, r] : discs) {
      double b = d.x * (ox - origin.x) + d.y * (oy - origin.y);
      double cc = (origin.x - ox) * (origin.x - ox) + (origin.y - oy) * (origin.y - oy) - r * r;
      double disc = b * b - cc;
      if (disc >= 0) reach = std::max(reach, b + std::sqrt(disc));
    }
    c.push_back({origin.x + reach * d.x, origin.y + reach * d.y});
  }
  return c;
}

Contour rotated(const Contour& c, double degrees) {
  double t = degrees * kPi / 180.0;
  Contour out;
  for (Vec2 p : c) {
    double x = p.x - 0.5, y = p.y - 0.5;
    out.push_back({0.5 + x * std::cos(t) - y * std::sin(t), 0.5 + x * std::sin(t) + y * std::cos(t)});
  }
  return out;
}

// Thick segment from a to b as a quadrilateral.
Contour bar(Vec2 a, Vec2 b, double width) {
  double dx = b.x - a.x, dy = b.y - a.y;
  double len = std::hypot(dx, dy);
  double nx = -dy / len * width / 2, ny = dx / len * width / 2;
  return {{a.x + nx, a.y + ny}, {b.x + nx, b.y + ny}, {b.x - nx, b.y - ny}, {a.x - nx, a.y - ny}};
}

Glyph umbrella() {
  Contour canopy = arc({0.5, 0.52}, 0.44, 180, 360, 48);
  Contour handle{{0.47, 0.52}, {0.53, 0.52}, {0.53, 0.8}};
  for (Vec2 p : arc({0.43, 0.8}, 0.10, 0, 180, 16)) handle.push_back(p);
  for (Vec2 p : arc({0.43, 0.8}, 0.04, 180, 0, 10)) handle.push_back(p);
  return Glyph{{oriented(canopy, true), oriented(handle, true)}};
}

Glyph spade() {
  Contour body = heart(0.1, 0.9, 0.06, 0.74, true);
  Contour stem{{0.46, 0.6}, {0.54, 0.6}, {0.62, 0.93}, {0.38, 0.93}};
  return Glyph{{oriented(body, true), oriented(stem, true)}};
}

Glyph scissors() {
  Glyph g;
  for (Vec2 c : {Vec2{0.28, 0.76}, Vec2{0.72, 0.76}}) {
    g.contours.push_back(oriented(circle(c, 0.16), true));
    g.contours.push_back(oriented(circle(c, 0.08), false));
  }
  g.contours.push_back(oriented(bar({0.36, 0.64}, {0.8, 0.06}, 0.1), true));
  g.contours.push_back(oriented(bar({0.64, 0.64}, {0.2, 0.06}, 0.1), true));
  return g;
}

Glyph infinity() {
  Glyph g;
  for (Vec2 c : {Vec2{0.3, 0.5}, Vec2{0.7, 0.5}}) {
    g.contours.push_back(oriented(circle(c, 0.22), true));
    g.contours.push_back(oriented(circle(c, 0.1), false));
  }
  return g;
}

Glyph crescent() {
  Contour c = arc({0.5, 0.5}, 0.42, 50, 310, 52);
  Vec2 inner_center{0.62, 0.5};
  Vec2 end = c.back();
  Vec2 start = c.front();
  double r = std::hypot(end.x - inner_center.x, end.y - inner_center.y);
  double from = std::atan2(end.y - inner_center.y, end.x - inner_center.x) * 180 / kPi;
  double to = std::atan2(start.y - inner_center.y, start.x - inner_center.x) * 180 / kPi;
  if (to > from) to -= 360;  // sweep back around the left side
  Contour inner = arc(inner_center, r, from, to, 40);
  c.insert(c.end(), inner.begin() + 1, inner.end() - 1);
  return solid(std::move(c));
}

std::map<std::string, Glyph, std::less<>> build_catalog() {
  std::map<std::string, Glyph, std::less<>> g;
  g["airplane"] = solid({{0.5, 0.05},  {0.56, 0.15}, {0.56, 0.38}, {0.95, 0.58}, {0.95, 0.66}, {0.56, 0.56},
                         {0.56, 0.78}, {0.7, 0.88},  {0.7, 0.94},  {0.5, 0.89},  {0.3, 0.94},  {0.3, 0.88},
                         {0.44, 0.78}, {0.44, 0.56}, {0.05, 0.66}, {0.05, 0.58}, {0.44, 0.38}, {0.44, 0.15}});
  g["triangle"] = solid({{0.5, 0.08}, {0.92, 0.88}, {0.08, 0.88}});
  g["cloud"] = solid(disc_union({0.5, 0.56}, {{0.28, 0.6, 0.19}, {0.48, 0.44, 0.25}, {0.72, 0.58, 0.2}, {0.5, 0.66, 0.2}}));
  g["X-shape"] = solid(rotated({{0.37, 0.05}, {0.63, 0.05}, {0.63, 0.37}, {0.95, 0.37}, {0.95, 0.63}, {0.63, 0.63},
                                {0.63, 0.95}, {0.37, 0.95}, {0.37, 0.63}, {0.05, 0.63}, {0.05, 0.37}, {0.37, 0.37}},
                               45));
  g["umbrella"] = umbrella();
  g["pentagon"] = solid(regular(5, 0.46, -90, {0.5, 0.54}));
  g["heart"] = solid(heart(0.08, 0.92, 0.12, 0.9, false));
  g["star"] = solid(star(5, 0.48, 0.2));
  g["circle"] = solid(circle({0.5, 0.5}, 0.45));
  g["square"] = solid({{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}});
  g["spade"] = spade();
  g["scissors"] = scissors();
  g["infinity"] = infinity();
  g["check mark"] = solid({{0.06, 0.55}, {0.2, 0.41}, {0.4, 0.61}, {0.8, 0.14}, {0.94, 0.27}, {0.4, 0.86}});
  g["right-arrow"] = solid({{0.05, 0.36}, {0.55, 0.36}, {0.55, 0.12}, {0.95, 0.5}, {0.55, 0.88}, {0.55, 0.64}, {0.05, 0.64}});
  g["diamond"] = solid({{0.5, 0.05}, {0.9, 0.5}, {0.5, 0.95}, {0.1, 0.5}});
  g["hexagon"] = solid(regular(6, 0.46, 0));
  g["ring"] = ring({0.5, 0.5}, 0.45, 0.25);
  g["crescent"] = crescent();
  g["trapezoid"] = solid({{0.27, 0.2}, {0.73, 0.2}, {0.95, 0.8}, {0.05, 0.8}});
  g["L"] = solid({{0.25, 0.1}, {0.43, 0.1}, {0.43, 0.74}, {0.8, 0.74}, {0.8, 0.9}, {0.25, 0.9}});
  g["T"] = solid({{0.14, 0.1}, {0.86, 0.1}, {0.86, 0.27}, {0.59, 0.27}, {0.59, 0.9}, {0.41, 0.9}, {0.41, 0.27}, {0.14, 0.27}});
  return g;
}

}  // namespace

double contour_area(const Contour& c) {
  double s = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const Vec2& a = c[i];
    const Vec2& b = c[(i + 1) % c.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return s / 2;
}

const std::map<std::string, Glyph, std::less<>>& glyph_catalog() {
  static const auto catalog = build_catalog();
  return catalog;
}

bool has_glyph(std::string_view shape) { return glyph_catalog().count(catalog::canonical_shape(shape)) > 0; }

const Glyph& glyph_for(std::string_view shape) {
  const auto& g = glyph_catalog();
  auto it = g.find(catalog::canonical_shape(shape));
  if (it == g.end()) throw Error(ErrorCode::UnknownIdentifier, "shape '" + std::string(shape) + "'");
  return it->second;
}

std::string glyph_catalog_json() {
  nlohmann::ordered_json doc;
  doc["version"] = 1;
  doc["glyphs"] = nlohmann::ordered_json::object();
  for (const auto& [name, glyph] : glyph_catalog()) {
    auto contours = nlohmann::ordered_json::array();
    for (const auto& c : glyph.contours) {
      auto pts = nlohmann::ordered_json::array();
      for (Vec2 p : c) pts.push_back({std::round(p.x * 1e6) / 1e6, std::round(p.y * 1e6) / 1e6});
      contours.push_back(std::move(pts));
    }
    doc["glyphs"][name] = std::move(contours);
  }
  return doc.dump(1) + "\n";
}

}  // namespace bindbench
