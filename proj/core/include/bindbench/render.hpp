#pragma once

#include <string>
#include <vector>

#include "bindbench/color.hpp"
#include "bindbench/domain.hpp"
#include "bindbench/raster.hpp"

namespace bindbench {

// White canvas with every object drawn as its filled glyph. Throws UnknownIdentifier.
Image rasterize_scene(const SceneSpec& scene, const Palette& palette = Palette::builtin());

// PNG bytes of rasterize_scene; identical input gives identical bytes.
std::string render_scene(const SceneSpec& scene, const Palette& palette = Palette::builtin());

// One PNG (Unified) or three PNGs ordered source, target 1, target 2 (Decomposed).
std::vector<std::string> render_rmts(const RmtsTrial& trial, RmtsMode mode, const Palette& palette = Palette::builtin());

}  // namespace bindbench
