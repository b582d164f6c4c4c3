#include <colorgpt/color.hpp>
#include <colorgpt/errors.hpp>
#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace colorgpt;
using colorgpt::testing::random_color;

TEST(Hex, ParsesExamples) {
  EXPECT_EQ(hex_to_color("#ffffff"), (Color{255, 255, 255}));
  EXPECT_EQ(hex_to_color("#000000"), (Color{0, 0, 0}));
  EXPECT_EQ(hex_to_color("#FF7f00"), (Color{255, 127, 0}));
}

TEST(Hex, FormatsLowercase) {
  EXPECT_EQ(color_to_hex({255, 255, 255}), "#ffffff");
  EXPECT_EQ(color_to_hex({0, 0, 0}), "#000000");
  EXPECT_EQ(color_to_hex({255, 127, 0}), "#ff7f00");
}

TEST(Hex, RejectsMalformed) {
  for (const char* bad : {"", "#fff", "ffffff", "#fffffff", "#gg0000", "# 00000", "#12345z"}) {
    EXPECT_THROW(hex_to_color(bad), ParseError) << bad;
  }
  try {
    hex_to_color("#12x456");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("#12x456"), std::string::npos);
  }
}

TEST(Hex, RoundTripRandomAndCorners) {
  Rng rng(1);
  for (int i = 0; i < 10000; ++i) {
    const Color c = random_color(rng);
    ASSERT_EQ(hex_to_color(color_to_hex(c)), c);
  }
  for (int m = 0; m < 8; ++m) {
    const Color c{std::uint8_t(m & 1 ? 255 : 0), std::uint8_t(m & 2 ? 255 : 0), std::uint8_t(m & 4 ? 255 : 0)};
    EXPECT_EQ(hex_to_color(color_to_hex(c)), c);
  }
}

TEST(Lab, AnchorValues) {
  const auto white = color_to_lab({255, 255, 255});
  EXPECT_NEAR(white.l, 100.0, 0.1);
  EXPECT_NEAR(white.a, 0.0, 0.1);
  EXPECT_NEAR(white.b, 0.0, 0.1);
  const auto black = color_to_lab({0, 0, 0});
  EXPECT_NEAR(black.l, 0.0, 0.1);
  EXPECT_NEAR(black.a, 0.0, 0.1);
  EXPECT_NEAR(black.b, 0.0, 0.1);
  const auto red = color_to_lab({255, 0, 0});
  EXPECT_NEAR(red.l, 53.24, 0.5);
  EXPECT_NEAR(red.a, 80.09, 0.5);
  EXPECT_NEAR(red.b, 67.20, 0.5);
}

// Values frozen from scikit-image (scripts/color_oracle.py). Its D65 white
// is the rounded (0.95047, 1, 1.08883); ours is derived from the matrix, so
// the two differ by a few thousandths.
TEST(Lab, MatchesReferenceImplementation) {
  const auto oracle = colorgpt::testing::read_json(colorgpt::testing::fixture("lab_oracle.json"));
  ASSERT_EQ(oracle.size(), 50u);
  for (const auto& row : oracle) {
    const auto lab = color_to_lab(hex_to_color(row["hex"].get<std::string>()));
    EXPECT_NEAR(lab.l, row["lab"][0].get<double>(), 0.02) << row["hex"];
    EXPECT_NEAR(lab.a, row["lab"][1].get<double>(), 0.02) << row["hex"];
    EXPECT_NEAR(lab.b, row["lab"][2].get<double>(), 0.02) << row["hex"];
  }
}

TEST(Lab, InverseAnchors) {
  EXPECT_EQ(lab_to_color({100, 0, 0}), (Color{255, 255, 255}));
  EXPECT_EQ(lab_to_color({0, 0, 0}), (Color{0, 0, 0}));
}

TEST(Lab, OutOfGamutClamps) {
  EXPECT_NO_THROW(lab_to_color({50, 200, -200}));
  EXPECT_EQ(lab_to_color({120, 0, 0}), (Color{255, 255, 255}));
  EXPECT_EQ(lab_to_color({-10, 0, 0}), (Color{0, 0, 0}));
}

TEST(Lab, RoundTripWithinOne) {
  Rng rng(2);
  std::vector<Color> sample;
  for (int i = 0; i < 1000; ++i) sample.push_back(random_color(rng));
  for (int m = 0; m < 8; ++m) {
    sample.push_back({std::uint8_t(m & 1 ? 255 : 0), std::uint8_t(m & 2 ? 255 : 0), std::uint8_t(m & 4 ? 255 : 0)});
  }
  for (const Color c : sample) {
    const Color back = lab_to_color(color_to_lab(c));
    ASSERT_LE(std::abs(int(back.r) - c.r), 1) << color_to_hex(c);
    ASSERT_LE(std::abs(int(back.g) - c.g), 1) << color_to_hex(c);
    ASSERT_LE(std::abs(int(back.b) - c.b), 1) << color_to_hex(c);
  }
}

TEST(Lab, GrayAxisMonotone) {
  double prev = -1.0;
  for (int v = 0; v < 256; ++v) {
    const double l = color_to_lab({std::uint8_t(v), std::uint8_t(v), std::uint8_t(v)}).l;
    EXPECT_GE(l, prev);
    prev = l;
  }
}

TEST(DeltaE, Examples) {
  const LabColor v{42.0, -3.0, 17.5};
  EXPECT_EQ(delta_e(v, v), 0.0);
  EXPECT_NEAR(delta_e(Color{255, 255, 255}, Color{0, 0, 0}), 100.0, 0.5);
}

TEST(DeltaE, MetricAxiomsSampled) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Color x = random_color(rng), y = random_color(rng), z = random_color(rng);
    const double xy = delta_e(x, y), yx = delta_e(y, x);
    EXPECT_DOUBLE_EQ(xy, yx);
    EXPECT_EQ(xy == 0.0, x == y);
    EXPECT_LE(delta_e(x, z), xy + delta_e(y, z) + 1e-9);
  }
}

TEST(RgbDistance, Euclidean) {
  EXPECT_DOUBLE_EQ(rgb_distance({0, 0, 0}, {3, 4, 0}), 5.0);
  EXPECT_NEAR(rgb_distance({0, 0, 0}, {255, 255, 255}), 441.67, 0.01);
}

TEST(Quantize, Examples) {
  EXPECT_EQ(quantize({0, 0, 0}), (BinIndex{0, 0, 0}));
  EXPECT_EQ(quantize({255, 255, 255}), (BinIndex{15, 15, 15}));
  EXPECT_EQ(quantize({16, 31, 32}), (BinIndex{1, 1, 2}));
  EXPECT_EQ(quantize({255, 255, 255}).flat(), 4095);
}

TEST(Quantize, TotalAndTight) {
  for (int v = 0; v < 256; ++v) {
    const auto b = quantize({std::uint8_t(v), 0, 0});
    EXPECT_GE(b.r, 0);
    EXPECT_LE(b.r, 15);
    EXPECT_EQ(b.r, v / 16);
  }
  Rng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const Color x = random_color(rng), y = random_color(rng);
    if (quantize(x) == quantize(y)) {
      EXPECT_LT(std::abs(int(x.r) - y.r), 16);
      EXPECT_LT(std::abs(int(x.g) - y.g), 16);
      EXPECT_LT(std::abs(int(x.b) - y.b), 16);
    }
  }
}

TEST(Representation, ParseAndName) {
  for (const char* name : {"word", "hex", "rgb", "cielab", "wordhex-h", "wordhex-w"}) {
    EXPECT_EQ(Representation::parse(name).name(), name);
  }
  EXPECT_THROW(Representation::parse("hsv"), ParseError);
  EXPECT_EQ(Representation::parse("wordhex-h"), Representation::parse("wordhex-h"));
  EXPECT_FALSE(Representation::parse("wordhex-h") == Representation::parse("wordhex-w"));
}
