#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace bindbench {

struct Vec2 {
  double x = 0;
  double y = 0;
};

using Contour = std::vector<Vec2>;

// A filled outline in the unit square (y grows downward), drawn with the nonzero winding rule.
// Holes are contours wound opposite to their enclosing contour.
struct Glyph {
  std::vector<Contour> contours;
};

const std::map<std::string, Glyph, std::less<>>& glyph_catalog();

// Resolves aliases ("cross"); throws UnknownIdentifier for unknown shapes.
const Glyph& glyph_for(std::string_view shape);
bool has_glyph(std::string_view shape);

// Signed shoelace area summed over contours.
double contour_area(const Contour& c);

// The catalog as a JSON document: {"version": 1, "glyphs": {name: [[[x, y], ...], ...]}}, coordinates
// rounded to 1e-6.
std::string glyph_catalog_json();

}  // namespace bindbench
