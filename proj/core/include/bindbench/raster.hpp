#pragma once

#include <cstdint>
#include <vector>

#include "bindbench/color.hpp"
#include "bindbench/glyphs.hpp"

namespace bindbench {

// 8-bit RGB, row-major, no padding.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h, Rgb fill = kWhite);

  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  friend bool operator==(const Image&, const Image&) = default;
};

// Per-pixel coverage in samples (0..4) from a 2x2 supersampled, fixed-point scanline fill
// of `glyph` scaled to a size x size box centered at (cx, cy).
struct Coverage {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  int at(int x, int y) const { return samples[static_cast<std::size_t>(y - y0) * width + (x - x0)]; }
  long long total() const;
};

inline constexpr int kSamplesPerPixel = 4;

Coverage rasterize_glyph(const Glyph& glyph, int cx, int cy, int size, int canvas_w, int canvas_h);

// Blends `color` over the image in proportion to coverage.
void composite(Image& image, const Coverage& cov, Rgb color);

}  // namespace bindbench
