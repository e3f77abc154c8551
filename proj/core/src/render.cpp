#include "bindbench/render.hpp"

#include "bindbench/glyphs.hpp"
#include "bindbench/png.hpp"
#include "bindbench/stimulus.hpp"

namespace bindbench {

Image rasterize_scene(const SceneSpec& scene, const Palette& palette) {
  Image image(scene.canvas.width, scene.canvas.height);
  for (const ObjectSpec& o : scene.objects) {
    const Glyph& glyph = glyph_for(o.shape);
    Rgb color = palette.at(o.color);
    composite(image, rasterize_glyph(glyph, o.cx, o.cy, o.size, image.width, image.height), color);
  }
  return image;
}

std::string render_scene(const SceneSpec& scene, const Palette& palette) {
  return encode_png(rasterize_scene(scene, palette));
}

std::vector<std::string> render_rmts(const RmtsTrial& trial, RmtsMode mode, const Palette& palette) {
  std::vector<std::string> out;
  for (const SceneSpec& s : rmts_scenes(trial, mode)) out.push_back(render_scene(s, palette));
  return out;
}

}  // namespace bindbench
