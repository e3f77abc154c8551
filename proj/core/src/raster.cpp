#include "bindbench/raster.hpp"

#include <algorithm>
#include <cmath>

namespace bindbench {
namespace {

constexpr std::int64_t kSub = 16;  // fixed-point units per pixel
constexpr std::int64_t kStep = kSub / 2;
constexpr std::int64_t kOffset = kSub / 4;

struct Edge {
  std::int64_t x0, y0, x1, y1;
  int dir;
};

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

}  // namespace

Image::Image(int w, int h, Rgb fill) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3) {
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = fill.r;
    rgb[i + 1] = fill.g;
    rgb[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void Image::set(int x, int y, Rgb c) {
  std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
  rgb[i] = c.r;
  rgb[i + 1] = c.g;
  rgb[i + 2] = c.b;
}

long long Coverage::total() const {
  long long s = 0;
  for (auto v : samples) s += v;
  return s;
}

Coverage rasterize_glyph(const Glyph& glyph, int cx, int cy, int size, int canvas_w, int canvas_h) {
  const double left = cx - size / 2.0;
  const double top = cy - size / 2.0;
  std::vector<Edge> edges;
  std::int64_t min_y = INT64_MAX, max_y = INT64_MIN, min_x = INT64_MAX, max_x = INT64_MIN;
  for (const Contour& c : glyph.contours) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Vec2& a = c[i];
      const Vec2& b = c[(i + 1) % c.size()];
      Edge e{std::llround((left + a.x * size) * kSub), std::llround((top + a.y * size) * kSub),
             std::llround((left + b.x * size) * kSub), std::llround((top + b.y * size) * kSub), 1};
      min_x = std::min({min_x, e.x0, e.x1});
      max_x = std::max({max_x, e.x0, e.x1});
      min_y = std::min({min_y, e.y0, e.y1});
      max_y = std::max({max_y, e.y0, e.y1});
      if (e.y0 == e.y1) continue;
      if (e.y0 > e.y1) {
        std::swap(e.x0, e.x1);
        std::swap(e.y0, e.y1);
        e.dir = -1;
      }
      edges.push_back(e);
    }
  }

  Coverage cov;
  if (edges.empty()) return cov;
  cov.x0 = static_cast<int>(std::clamp<std::int64_t>(floor_div(min_x, kSub), 0, canvas_w));
  cov.y0 = static_cast<int>(std::clamp<std::int64_t>(floor_div(min_y, kSub), 0, canvas_h));
  int x1 = static_cast<int>(std::clamp<std::int64_t>(ceil_div(max_x, kSub) + 1, 0, canvas_w));
  int y1 = static_cast<int>(std::clamp<std::int64_t>(ceil_div(max_y, kSub) + 1, 0, canvas_h));
  cov.width = std::max(0, x1 - cov.x0);
  cov.height = std::max(0, y1 - cov.y0);
  cov.samples.assign(static_cast<std::size_t>(cov.width) * cov.height, 0);

  std::vector<std::pair<std::int64_t, int>> crossings;
  for (int py = cov.y0; py < cov.y0 + cov.height; ++py) {
    for (int s = 0; s < 2; ++s) {
      const std::int64_t sy = py * kSub + kOffset + s * kStep;
      crossings.clear();
      for (const Edge& e : edges) {
        if (sy < e.y0 || sy >= e.y1) continue;
        std::int64_t x = e.x0 + floor_div((sy - e.y0) * (e.x1 - e.x0), e.y1 - e.y0);
        crossings.emplace_back(x, e.dir);
      }
      std::sort(crossings.begin(), crossings.end());
      int winding = 0;
      for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
        winding += crossings[i].second;
        if (winding == 0) continue;
        // Sample columns k sit at k * kStep + kOffset; fill those in [xa, xb).
        std::int64_t k0 = ceil_div(crossings[i].first - kOffset, kStep);
        std::int64_t k1 = ceil_div(crossings[i + 1].first - kOffset, kStep);
        k0 = std::max<std::int64_t>(k0, 2LL * cov.x0);
        k1 = std::min<std::int64_t>(k1, 2LL * (cov.x0 + cov.width));
        for (std::int64_t k = k0; k < k1; ++k) {
          ++cov.samples[static_cast<std::size_t>(py - cov.y0) * cov.width + (k / 2 - cov.x0)];
        }
      }
    }
  }
  return cov;
}

void composite(Image& image, const Coverage& cov, Rgb color) {
  for (int y = cov.y0; y < cov.y0 + cov.height; ++y) {
    for (int x = cov.x0; x < cov.x0 + cov.width; ++x) {
      int c = cov.at(x, y);
      if (c == 0) continue;
      Rgb under = image.at(x, y);
      auto mix = [c](int bg, int fg) {
        return static_cast<std::uint8_t>((bg * (kSamplesPerPixel - c) + fg * c + kSamplesPerPixel / 2) / kSamplesPerPixel);
      };
      image.set(x, y, {mix(under.r, color.r), mix(under.g, color.g), mix(under.b, color.b)});
    }
  }
}

}  // namespace bindbench
