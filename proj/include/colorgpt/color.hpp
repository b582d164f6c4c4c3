#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace colorgpt {

/// 8-bit sRGB color. The canonical color value everywhere in the library;
/// textual representations are derived from it.
struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(const Color&, const Color&) = default;
  friend constexpr auto operator<=>(const Color&, const Color&) = default;
};

/// CIELAB under D65. l in [0, 100] for any color produced from a valid Color.
struct LabColor {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend constexpr bool operator==(const LabColor&, const LabColor&) = default;
};

/// Coordinates of the 16x16x16 RGB bin a color falls into.
struct BinIndex {
  int r = 0;
  int g = 0;
  int b = 0;

  friend constexpr bool operator==(const BinIndex&, const BinIndex&) = default;
  friend constexpr auto operator<=>(const BinIndex&, const BinIndex&) = default;

  /// Flat index in [0, 4096).
  constexpr int flat() const { return (r * 16 + g) * 16 + b; }
};

/// How colors are written into prompts and read back from replies.
struct Representation {
  enum class Kind { Word, Hexcode, Rgb, Cielab, WordHex };
  /// For WordHex only: read the hex part (H) or the word part (W) back.
  enum class Mode { H, W };

  Kind kind = Kind::Hexcode;
  Mode mode = Mode::H;

  friend constexpr bool operator==(const Representation& x, const Representation& y) {
    return x.kind == y.kind && (x.kind != Kind::WordHex || x.mode == y.mode);
  }

  /// Parses "word", "hex", "rgb", "cielab", "wordhex-h", "wordhex-w" (and a few aliases).
  static Representation parse(std::string_view name);
  /// Stable short name, the inverse of parse().
  std::string name() const;
};

/// Parses "#rrggbb" (case-insensitive). Throws ParseError otherwise.
Color hex_to_color(std::string_view hex);
/// Lowercase "#rrggbb".
std::string color_to_hex(Color c);

LabColor color_to_lab(Color c);
/// Inverse of color_to_lab. Out-of-gamut results are clamped per channel.
Color lab_to_color(const LabColor& lab);

/// Euclidean distance in CIELAB.
double delta_e(const LabColor& x, const LabColor& y);
inline double delta_e(Color x, Color y) { return delta_e(color_to_lab(x), color_to_lab(y)); }

/// Euclidean distance between channel triples in [0, 255] units.
double rgb_distance(Color x, Color y);

constexpr BinIndex quantize(Color c) { return {c.r / 16, c.g / 16, c.b / 16}; }

}  // namespace colorgpt
