#include <colorgpt/errors.hpp>
#include <colorgpt/image.hpp>
#include <gtest/gtest.h>

#include <algorithm>

#include "test_support.hpp"

using namespace colorgpt;

namespace {

const std::vector<std::pair<Color, std::size_t>> kBands = {
    {{0x1f, 0x3a, 0x93}, 30}, {{0xe7, 0x4c, 0x3c}, 25}, {{0xf1, 0xc4, 0x0f}, 20},
    {{0x2e, 0xcc, 0x71}, 15}, {{0xff, 0xff, 0xff}, 10}};

PixelGrid stripes() {
  PixelGrid g(100, 20);
  std::size_t x = 0;
  for (const auto& [c, w] : kBands) {
    for (std::size_t dx = 0; dx < w; ++dx) {
      for (std::size_t y = 0; y < 20; ++y) g.at(x + dx, y) = c;
    }
    x += w;
  }
  return g;
}

std::vector<Color> band_colors() {
  std::vector<Color> out;
  for (const auto& b : kBands) out.push_back(b.first);
  return out;
}

}  // namespace

TEST(ExtractPalette, UniformImage) {
  const PixelGrid g(8, 8, {10, 200, 30});
  const auto p = extract_palette(g);
  EXPECT_EQ(p.colors(), (std::vector<Color>{{10, 200, 30}}));
}

TEST(ExtractPalette, SeparatedColorsOrderedByArea) {
  const auto colors = band_colors();
  for (std::size_t i = 0; i < colors.size(); ++i) {
    for (std::size_t j = i + 1; j < colors.size(); ++j) ASSERT_GE(delta_e(colors[i], colors[j]), 30.0);
  }
  EXPECT_EQ(extract_palette(stripes()).colors(), colors);
}

TEST(ExtractPalette, CloseColorsMerge) {
  PixelGrid g(10, 10, {120, 120, 120});
  for (std::size_t x = 0; x < 4; ++x) {
    for (std::size_t y = 0; y < 10; ++y) g.at(x, y) = {123, 121, 120};
  }
  ASSERT_LT(delta_e(Color{120, 120, 120}, Color{123, 121, 120}), 10.0);
  const auto p = extract_palette(g);
  EXPECT_EQ(p.size(), 1u);
}

TEST(ExtractPalette, RespectsMaxColorsAndSpacing) {
  Rng rng(7);
  PixelGrid g(64, 64);
  for (auto& px : g.pixels) px = colorgpt::testing::random_color(rng);
  for (std::size_t max_colors = 1; max_colors <= 5; ++max_colors) {
    ExtractOptions opts;
    opts.max_colors = max_colors;
    const auto colors = extract_palette(g, opts).colors();
    EXPECT_GE(colors.size(), 1u);
    EXPECT_LE(colors.size(), max_colors);
    for (std::size_t i = 0; i < colors.size(); ++i) {
      for (std::size_t j = i + 1; j < colors.size(); ++j) EXPECT_GE(delta_e(colors[i], colors[j]), 10.0);
    }
  }
}

TEST(ExtractPalette, IndependentOfPixelOrder) {
  Rng rng(8);
  PixelGrid g(40, 40);
  for (auto& px : g.pixels) px = colorgpt::testing::random_color(rng);
  auto shuffled = g;
  std::reverse(shuffled.pixels.begin(), shuffled.pixels.end());
  std::rotate(shuffled.pixels.begin(), shuffled.pixels.begin() + 313, shuffled.pixels.end());
  EXPECT_EQ(extract_palette(g), extract_palette(shuffled));
  EXPECT_EQ(extract_palette(g), extract_palette(g));
}

TEST(ExtractPalette, Errors) {
  EXPECT_THROW(extract_palette(PixelGrid{}), ValidationError);
  ExtractOptions opts;
  opts.max_colors = 6;
  EXPECT_THROW(extract_palette(PixelGrid(2, 2), opts), ValidationError);
  opts.max_colors = 0;
  EXPECT_THROW(extract_palette(PixelGrid(2, 2), opts), ValidationError);
}

// stripes*.png are written by scripts/make_image_fixture.py (Pillow).
TEST(ReadImage, DecodesPng) {
  for (const char* name : {"stripes.png", "stripes_rgba.png"}) {
    const auto g = read_image(colorgpt::testing::fixture(name));
    ASSERT_EQ(g.width, 100u);
    ASSERT_EQ(g.height, 20u);
    EXPECT_EQ(g.pixels, stripes().pixels) << name;
  }
}

TEST(ReadImage, BmpRoundTrip) {
  colorgpt::testing::TempDir dir("bmp");
  const auto g = stripes();
  write_bmp(g, dir / "s.bmp");
  const auto back = read_image(dir / "s.bmp");
  EXPECT_EQ(back.width, g.width);
  EXPECT_EQ(back.height, g.height);
  EXPECT_EQ(back.pixels, g.pixels);
}

TEST(ReadImage, Errors) {
  colorgpt::testing::TempDir dir("badimg");
  EXPECT_THROW(read_image(dir / "missing.png"), IoError);
  {
    std::ofstream(dir / "junk.png") << "not an image";
  }
  EXPECT_THROW(read_image(dir / "junk.png"), ParseError);
}
