#include "bindbench/color.hpp"

#include <cmath>
#include <iterator>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <numbers>

#include "bindbench/embedded_data.hpp"
#include "bindbench/error.hpp"

namespace bindbench {
namespace {

double linearize(std::uint8_t v) {
  double c = v / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) { return t > 0.008856 ? std::cbrt(t) : 7.787 * t + 16.0 / 116.0; }

double deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double rad(double deg) { return deg * std::numbers::pi / 180.0; }

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Rgb parse_hex_color(std::string_view hex) {
  if (hex.size() != 7 || hex[0] != '#') throw Error(ErrorCode::ConfigError, "bad color '" + std::string(hex) + "'");
  std::array<std::uint8_t, 3> v{};
  for (int i = 0; i < 3; ++i) {
    int hi = hex_digit(hex[1 + 2 * i]);
    int lo = hex_digit(hex[2 + 2 * i]);
    if (hi < 0 || lo < 0) throw Error(ErrorCode::ConfigError, "bad color '" + std::string(hex) + "'");
    v[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return {v[0], v[1], v[2]};
}

std::string to_hex(Rgb c) { return fmt::format("#{:02X}{:02X}{:02X}", c.r, c.g, c.b); }

Lab srgb_to_lab(Rgb c) {
  double r = linearize(c.r);
  double g = linearize(c.g);
  double b = linearize(c.b);
  double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  // White point from the matrix rows, so sRGB white lands exactly on a = b = 0.
  double fx = lab_f(x / 0.9504700);
  double fy = lab_f(y / 1.0000001);
  double fz = lab_f(z / 1.0888300);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

double ciede2000(const Lab& p, const Lab& q) {
  const double c1 = std::hypot(p.a, p.b);
  const double c2 = std::hypot(q.a, q.b);
  const double cbar7 = std::pow((c1 + c2) / 2.0, 7);
  const double g = 0.5 * (1.0 - std::sqrt(cbar7 / (cbar7 + std::pow(25.0, 7))));
  const double a1 = (1.0 + g) * p.a;
  const double a2 = (1.0 + g) * q.a;
  const double cp1 = std::hypot(a1, p.b);
  const double cp2 = std::hypot(a2, q.b);
  auto hue = [](double b, double a) {
    if (a == 0 && b == 0) return 0.0;
    double h = deg(std::atan2(b, a));
    return h < 0 ? h + 360.0 : h;
  };
  const double h1 = hue(p.b, a1);
  const double h2 = hue(q.b, a2);

  const double dl = q.l - p.l;
  const double dc = cp2 - cp1;
  double dh = 0;
  if (cp1 * cp2 != 0) {
    dh = h2 - h1;
    if (dh > 180) dh -= 360;
    if (dh < -180) dh += 360;
  }
  const double dhh = 2.0 * std::sqrt(cp1 * cp2) * std::sin(rad(dh / 2.0));

  const double lbar = (p.l + q.l) / 2.0;
  const double cbar = (cp1 + cp2) / 2.0;
  double hbar = h1 + h2;
  if (cp1 * cp2 != 0) {
    if (std::abs(h1 - h2) <= 180) {
      hbar /= 2.0;
    } else {
      hbar = (h1 + h2 < 360) ? (h1 + h2 + 360) / 2.0 : (h1 + h2 - 360) / 2.0;
    }
  }
  const double t = 1 - 0.17 * std::cos(rad(hbar - 30)) + 0.24 * std::cos(rad(2 * hbar)) +
                   0.32 * std::cos(rad(3 * hbar + 6)) - 0.20 * std::cos(rad(4 * hbar - 63));
  const double dtheta = 30 * std::exp(-std::pow((hbar - 275) / 25, 2));
  const double cbar7p = std::pow(cbar, 7);
  const double rc = 2 * std::sqrt(cbar7p / (cbar7p + std::pow(25.0, 7)));
  const double sl = 1 + 0.015 * std::pow(lbar - 50, 2) / std::sqrt(20 + std::pow(lbar - 50, 2));
  const double sc = 1 + 0.045 * cbar;
  const double sh = 1 + 0.015 * cbar * t;
  const double rt = -std::sin(rad(2 * dtheta)) * rc;

  const double tl = dl / sl;
  const double tc = dc / sc;
  const double th = dhh / sh;
  return std::sqrt(tl * tl + tc * tc + th * th + rt * tc * th);
}

Palette Palette::from_json(std::string_view text) {
  Palette p;
  try {
    auto doc = nlohmann::json::parse(text);
    p.min_separation_ = doc.value("min_ciede2000", 0.0);
    for (const auto& [name, hex] : doc.at("colors").items()) p.colors_.emplace(name, parse_hex_color(hex.get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("palette: ") + e.what());
  }
  for (auto i = p.colors_.begin(); i != p.colors_.end(); ++i) {
    for (auto j = std::next(i); j != p.colors_.end(); ++j) {
      double de = ciede2000(srgb_to_lab(i->second), srgb_to_lab(j->second));
      if (de < p.min_separation_) {
        throw Error(ErrorCode::ConfigError, "palette: " + i->first + " and " + j->first + " are only " +
                                                std::to_string(de) + " apart");
      }
    }
  }
  return p;
}

const Palette& Palette::builtin() {
  static const Palette palette = from_json(embedded::palette_json());
  return palette;
}

Rgb Palette::at(std::string_view name) const {
  auto it = colors_.find(name);
  if (it == colors_.end()) throw Error(ErrorCode::UnknownIdentifier, "color '" + std::string(name) + "'");
  return it->second;
}

bool Palette::contains(std::string_view name) const { return colors_.find(name) != colors_.end(); }

}  // namespace bindbench
