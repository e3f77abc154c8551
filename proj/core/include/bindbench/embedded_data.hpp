#pragma once

#include <string_view>

namespace bindbench::embedded {

// Copies of data/palette.json and data/synonyms.json compiled into the library.
std::string_view palette_json();
std::string_view synonyms_json();

}  // namespace bindbench::embedded
