#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "bindbench/raster.hpp"

namespace bindbench {

// 8-bit RGB, non-interlaced, filter type 0 on every row, zlib level 6.
std::string encode_png(const Image& image);

// Decodes 8-bit RGB or RGBA (alpha dropped) non-interlaced PNGs with any per-row filter.
Image decode_png(std::string_view bytes);

}  // namespace bindbench
