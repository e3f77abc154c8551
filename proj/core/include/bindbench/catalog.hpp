#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bindbench::catalog {

// The fifteen shapes and colors offered to models in the 2D scene-description prompt.
const std::vector<std::string>& description_shapes();
const std::vector<std::string>& description_colors();

// Numerosity needs all-unique features for up to 20 objects, so it extends the description sets.
const std::vector<std::string>& numerosity_shapes();
const std::vector<std::string>& numerosity_colors();

// Relational match-to-sample uses an 8 x 8 subset.
const std::vector<std::string>& rmts_shapes();
const std::vector<std::string>& rmts_colors();

// Every shape with a glyph and every color in the palette.
const std::vector<std::string>& all_shapes();
const std::vector<std::string>& all_colors();

bool is_shape(std::string_view id);
bool is_color(std::string_view id);

// Aliases resolve to a canonical shape id ("cross" -> "X-shape"); unknown ids are returned unchanged.
std::string canonical_shape(std::string_view id);

// Text-to-image counting categories: 50 foods then 50 animals, plural nouns.
struct CountCategory {
  std::string plural;
  std::string kind;  // "food" or "animal"
};
const std::vector<CountCategory>& t2i_count_categories();

// Real-world object nouns and color words used to build text-to-image scene descriptions.
const std::vector<std::string>& t2i_scene_objects();
const std::vector<std::string>& t2i_scene_colors();

// English plural of a catalog noun.
std::string pluralize(std::string_view noun);

inline constexpr std::string_view kSearchShape = "circle";
inline constexpr std::string_view kSearchDistractorColor = "red";
inline constexpr std::string_view kSearchTargetColor = "green";
inline constexpr std::string_view kLetterL = "L";
inline constexpr std::string_view kLetterT = "T";

}  // namespace bindbench::catalog
