#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "bindbench/catalog.hpp"
#include "bindbench/color.hpp"
#include "bindbench/glyphs.hpp"
#include "bindbench/hashing.hpp"
#include "bindbench/png.hpp"
#include "bindbench/raster.hpp"
#include "bindbench/render.hpp"
#include "bindbench/stimulus.hpp"

using namespace bindbench;

namespace {

constexpr const char* GOLDEN_STAR = "0f1bdbdb1b728b52875a46ac68d7adc6332996dc2953343851bb499d21a992b6";
constexpr const char* GOLDEN_SEARCH = "4a33891f018e07bce1a6622412aa94ca90922b9f05f86296cefee9b106daed43";
constexpr const char* GOLDEN_COUNT = "adaf64bf69ab17da04e3da842e6e597a7a117a33576ee7a84061c2026c250116";
constexpr const char* GOLDEN_RMTS = "d671cec73c0a9550e1e3aa90f559f7a90f774e14e514239d24ddb2d4d49c03ca";

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SceneSpec single(const std::string& shape, const std::string& color, int cx, int cy, int size = kObjectSize) {
  SceneSpec s;
  s.canvas = kSceneCanvas;
  s.objects.push_back({shape, color, cx, cy, size});
  return s;
}

// Bounding box of non-white pixels inside [x0,x1) x [y0,y1).
struct Box {
  int x0 = 1 << 30, y0 = 1 << 30, x1 = -1, y1 = -1;
  long long inked = 0;
};

Box ink(const Image& img, int x0, int y0, int x1, int y1) {
  Box b;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      if (img.at(x, y) == kWhite) continue;
      ++b.inked;
      b.x0 = std::min(b.x0, x);
      b.y0 = std::min(b.y0, y);
      b.x1 = std::max(b.x1, x + 1);
      b.y1 = std::max(b.y1, y + 1);
    }
  return b;
}

// The pixels of [x0,x0+w) x [y0,y0+h).
std::vector<Rgb> crop(const Image& img, int x0, int y0, int w, int h) {
  std::vector<Rgb> out;
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x) out.push_back(img.at(x, y));
  return out;
}

}  // namespace

TEST(Color, Ciede2000ReferencePairs) {
  // Published CIEDE2000 test pairs.
  struct Pair {
    Lab a, b;
    double de;
  };
  const Pair pairs[] = {
      {{50, 2.6772, -79.7751}, {50, 0, -82.7485}, 2.0425},
      {{50, 0, 0}, {50, -1, 2}, 2.3669},
      {{50, 2.5, 0}, {73, 25, -18}, 27.1492},
      {{50, 2.5, 0}, {50, 3.1736, 0.5854}, 1.0000},
      {{60.2574, -34.0099, 36.2677}, {60.4626, -34.1751, 39.4387}, 1.2644},
      {{2.0776, 0.0795, -1.1350}, {0.9033, -0.0636, -0.5514}, 0.9082},
  };
  for (const auto& p : pairs) {
    EXPECT_NEAR(ciede2000(p.a, p.b), p.de, 5e-5);
    EXPECT_NEAR(ciede2000(p.b, p.a), p.de, 5e-5);
  }
}

TEST(Color, SrgbToLabKnownPoints) {
  Lab white = srgb_to_lab(kWhite);
  EXPECT_NEAR(white.l, 100.0, 1e-3);
  EXPECT_NEAR(white.a, 0.0, 1e-3);
  EXPECT_NEAR(white.b, 0.0, 1e-3);
  Lab black = srgb_to_lab({0, 0, 0});
  EXPECT_NEAR(black.l, 0.0, 1e-9);
  Lab red = srgb_to_lab({255, 0, 0});
  EXPECT_NEAR(red.l, 53.24, 0.01);
  EXPECT_NEAR(red.a, 80.09, 0.01);
  EXPECT_NEAR(red.b, 67.20, 0.01);
}

TEST(Color, HexRoundTrip) {
  EXPECT_EQ(parse_hex_color("#D62728"), (Rgb{0xD6, 0x27, 0x28}));
  EXPECT_EQ(to_hex({1, 2, 255}), "#0102FF");
}

TEST(Palette, CoversEveryCatalogColorWithSeparation) {
  const auto& p = Palette::builtin();
  for (const auto& c : catalog::all_colors()) EXPECT_TRUE(p.contains(c)) << c;
  for (const auto* list : {&catalog::description_colors(), &catalog::numerosity_colors(), &catalog::rmts_colors()})
    for (const auto& c : *list) EXPECT_TRUE(p.contains(c)) << c;
  EXPECT_GE(p.min_separation(), 8.0);
  std::vector<std::pair<std::string, Lab>> labs;
  for (const auto& [name, rgb] : p.colors()) labs.emplace_back(name, srgb_to_lab(rgb));
  for (std::size_t i = 0; i < labs.size(); ++i) {
    EXPECT_GE(ciede2000(labs[i].second, srgb_to_lab(kWhite)), p.min_separation()) << labs[i].first;
    for (std::size_t j = i + 1; j < labs.size(); ++j)
      EXPECT_GE(ciede2000(labs[i].second, labs[j].second), p.min_separation())
          << labs[i].first << " vs " << labs[j].first;
  }
}

TEST(Palette, RejectsCloseColors) {
  EXPECT_THROW(Palette::from_json(R"({"version":1,"min_ciede2000":8,"colors":{"a":"#FF0000","b":"#FE0101"}})"), Error);
}

TEST(Glyphs, EveryCatalogShapeHasALegibleGlyph) {
  std::vector<std::string> shapes = catalog::all_shapes();
  for (const auto* list : {&catalog::description_shapes(), &catalog::numerosity_shapes(), &catalog::rmts_shapes()})
    shapes.insert(shapes.end(), list->begin(), list->end());
  shapes.push_back("L");
  shapes.push_back("T");
  shapes.push_back("cross");
  for (const auto& shape : shapes) {
    ASSERT_TRUE(has_glyph(shape)) << shape;
    double area = 0;
    for (const auto& c : glyph_for(shape).contours) area += contour_area(c);
    EXPECT_GT(std::abs(area), 0.0) << shape;
    auto cov = rasterize_glyph(glyph_for(shape), 100, 100, 64, 200, 200);
    double px = static_cast<double>(cov.total()) / kSamplesPerPixel;
    EXPECT_GE(px, 400.0) << shape;
  }
  EXPECT_THROW(glyph_for("dodecahedron"), Error);
}

TEST(Glyphs, CatalogMatchesPinnedDataFile) {
  EXPECT_EQ(glyph_catalog_json(), slurp(std::string(BINDBENCH_TEST_DATA_DIR) + "/glyphs.json"));
}

TEST(Render, EmptySceneIsBlankWhite) {
  SceneSpec s;
  s.canvas = {64, 48};
  Image img = decode_png(render_scene(s));
  ASSERT_EQ(img.width, 64);
  ASSERT_EQ(img.height, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 64; ++x) ASSERT_EQ(img.at(x, y), kWhite);
}

TEST(Render, CenterProbeHasPaletteColor) {
  auto s = single("circle", "red", 512, 512);
  Image img = decode_png(render_scene(s));
  EXPECT_EQ(img.at(512, 512), Palette::builtin().at("red"));
  EXPECT_EQ(img.at(0, 0), kWhite);
  Box b = ink(img, 0, 0, img.width, img.height);
  EXPECT_GE(b.x0, 512 - 33);
  EXPECT_LE(b.x1, 512 + 33);
}

TEST(Render, DeterministicBytes) {
  auto s = gen_scene_description_trial(12, 4, 5);
  EXPECT_EQ(render_scene(s), render_scene(s));
}

TEST(Render, UnknownIdentifiers) {
  try {
    render_scene(single("dodecahedron", "red", 100, 100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownIdentifier);
  }
  try {
    render_scene(single("circle", "mauve", 100, 100));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownIdentifier);
  }
}

TEST(Render, GoldenHashes) {
  // sha256 of a fixed set of renders; any change to glyphs, rasterizer, palette or encoder shows up here.
  EXPECT_EQ(sha256_hex(render_scene(single("star", "teal", 512, 512))), GOLDEN_STAR);
  EXPECT_EQ(sha256_hex(render_scene(gen_search_trial(SearchCondition::Conjunctive, 20, true, 1))), GOLDEN_SEARCH);
  EXPECT_EQ(sha256_hex(render_scene(gen_numerosity_trial(EntropyCondition::High, 12, 2))), GOLDEN_COUNT);
  EXPECT_EQ(sha256_hex(render_rmts(gen_rmts_trial(3), RmtsMode::Unified)[0]), GOLDEN_RMTS);
}

TEST(Render, RmtsStructure) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto t = gen_rmts_trial(seed);
    auto unified = render_rmts(t, RmtsMode::Unified);
    auto parts = render_rmts(t, RmtsMode::Decomposed);
    ASSERT_EQ(unified.size(), 1u);
    ASSERT_EQ(parts.size(), 3u);
    Image u = decode_png(unified[0]);
    auto uscene = rmts_scenes(t, RmtsMode::Unified)[0];
    auto pscenes = rmts_scenes(t, RmtsMode::Decomposed);
    const int half = kRmtsObjectSize / 2;
    for (int p = 0; p < 3; ++p) {
      Image d = decode_png(parts[p]);
      ASSERT_EQ(d.width, kRmtsPairCanvas.width);
      // exactly two glyphs: ink on each half, none in the gap between them
      int mid = (pscenes[p].objects[0].cx + pscenes[p].objects[1].cx) / 2;
      EXPECT_GT(ink(d, 0, 0, mid, d.height).inked, 0);
      EXPECT_GT(ink(d, mid, 0, d.width, d.height).inked, 0);
      EXPECT_EQ(ink(d, mid - 8, 0, mid + 8, d.height).inked, 0);
      // each decomposed glyph raster equals its unified counterpart up to translation
      for (int k = 0; k < 2; ++k) {
        const auto& po = pscenes[p].objects[k];
        const auto& uo = uscene.objects[2 * p + k];
        EXPECT_EQ(crop(d, po.cx - half, po.cy - half, kRmtsObjectSize, kRmtsObjectSize),
                  crop(u, uo.cx - half, uo.cy - half, kRmtsObjectSize, kRmtsObjectSize));
      }
    }
    // six glyph boxes in the unified image and nothing else
    long long inside = 0;
    for (const auto& o : uscene.objects) inside += ink(u, o.cx - half, o.cy - half, o.cx + half, o.cy + half).inked;
    EXPECT_EQ(inside, ink(u, 0, 0, u.width, u.height).inked);
  }
}

TEST(Png, RoundTrip) {
  Image img(37, 19);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      img.set(x, y, {static_cast<std::uint8_t>(x * 7), static_cast<std::uint8_t>(y * 13), static_cast<std::uint8_t>(x ^ y)});
  std::string bytes = encode_png(img);
  EXPECT_EQ(bytes.substr(0, 8), std::string("\x89PNG\r\n\x1a\n", 8));
  EXPECT_EQ(decode_png(bytes), img);
}

TEST(Png, RejectsGarbage) { EXPECT_THROW(decode_png("not a png"), Error); }

TEST(Hashing, KnownValues) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
  EXPECT_EQ(base64_decode("Zm9vYg=="), "foob");
  EXPECT_THROW(base64_decode("@@@"), Error);
}
