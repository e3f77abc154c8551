#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace bindbench {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kWhite{255, 255, 255};

Rgb parse_hex_color(std::string_view hex);
std::string to_hex(Rgb c);

struct Lab {
  double l = 0;
  double a = 0;
  double b = 0;
};

// sRGB (D65) to CIELAB.
Lab srgb_to_lab(Rgb c);

// CIEDE2000 color difference with kL = kC = kH = 1.
double ciede2000(const Lab& x, const Lab& y);

class Palette {
 public:
  // Parses a palette document: {"version", "min_ciede2000", "colors": {name: "#RRGGBB"}}.
  static Palette from_json(std::string_view text);
  // The palette compiled into the library.
  static const Palette& builtin();

  Rgb at(std::string_view name) const;
  bool contains(std::string_view name) const;
  const std::map<std::string, Rgb, std::less<>>& colors() const { return colors_; }
  double min_separation() const { return min_separation_; }

 private:
  std::map<std::string, Rgb, std::less<>> colors_;
  double min_separation_ = 0;
};

}  // namespace bindbench
