#include "colorgpt/color.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>

#include "colorgpt/errors.hpp"

namespace colorgpt {
namespace {

// sRGB (IEC 61966-2-1) primaries, D65.
constexpr std::array<std::array<double, 3>, 3> kRgbToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};
constexpr std::array<std::array<double, 3>, 3> kXyzToRgb{{
    {3.2404542, -1.5371385, -0.4985314},
    {-0.9692660, 1.8760108, 0.0415560},
    {0.0556434, -0.2040259, 1.0572252},
}};

// Reference white taken from the matrix row sums so that #ffffff lands on a*=b*=0.
constexpr double kWhiteX = kRgbToXyz[0][0] + kRgbToXyz[0][1] + kRgbToXyz[0][2];
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = kRgbToXyz[2][0] + kRgbToXyz[2][1] + kRgbToXyz[2][2];

constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

double srgb_to_linear(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

double lab_f_inv(double f) {
  const double cube = f * f * f;
  return cube > kEpsilon ? cube : (116.0 * f - 16.0) / kKappa;
}

std::uint8_t to_channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::round(v * 255.0), 0.0, 255.0));
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

}  // namespace

Representation Representation::parse(std::string_view name) {
  std::string n;
  for (char c : name) {
    if (c == '_' || c == ' ' || c == '(' || c == ')') continue;
    n.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (n == "word") return {Kind::Word, Mode::H};
  if (n == "hex" || n == "hexcode") return {Kind::Hexcode, Mode::H};
  if (n == "rgb") return {Kind::Rgb, Mode::H};
  if (n == "cielab" || n == "lab") return {Kind::Cielab, Mode::H};
  if (n == "wordhex-h" || n == "wordhex" || n == "wordhexh") return {Kind::WordHex, Mode::H};
  if (n == "wordhex-w" || n == "wordhexw") return {Kind::WordHex, Mode::W};
  throw ParseError("unknown color representation '" + std::string(name) + "'");
}

std::string Representation::name() const {
  switch (kind) {
    case Kind::Word: return "word";
    case Kind::Hexcode: return "hex";
    case Kind::Rgb: return "rgb";
    case Kind::Cielab: return "cielab";
    case Kind::WordHex: return mode == Mode::H ? "wordhex-h" : "wordhex-w";
  }
  return "hex";
}

Color hex_to_color(std::string_view hex) {
  if (hex.size() != 7 || hex[0] != '#') {
    throw ParseError("malformed hex color '" + std::string(hex) + "'");
  }
  std::array<int, 6> d{};
  for (std::size_t i = 0; i < 6; ++i) {
    d[i] = hex_digit(hex[i + 1]);
    if (d[i] < 0) throw ParseError("malformed hex color '" + std::string(hex) + "'");
  }
  return {static_cast<std::uint8_t>(d[0] * 16 + d[1]), static_cast<std::uint8_t>(d[2] * 16 + d[3]),
          static_cast<std::uint8_t>(d[4] * 16 + d[5])};
}

std::string color_to_hex(Color c) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out = "#";
  for (std::uint8_t v : {c.r, c.g, c.b}) {
    out.push_back(kDigits[v >> 4]);
    out.push_back(kDigits[v & 0xf]);
  }
  return out;
}

LabColor color_to_lab(Color c) {
  const std::array<double, 3> lin{srgb_to_linear(c.r / 255.0), srgb_to_linear(c.g / 255.0),
                                  srgb_to_linear(c.b / 255.0)};
  std::array<double, 3> xyz{};
  for (std::size_t i = 0; i < 3; ++i) {
    xyz[i] = kRgbToXyz[i][0] * lin[0] + kRgbToXyz[i][1] * lin[1] + kRgbToXyz[i][2] * lin[2];
  }
  const double fx = lab_f(xyz[0] / kWhiteX);
  const double fy = lab_f(xyz[1] / kWhiteY);
  const double fz = lab_f(xyz[2] / kWhiteZ);
  return {std::clamp(116.0 * fy - 16.0, 0.0, 100.0), 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Color lab_to_color(const LabColor& lab) {
  const double fy = (lab.l + 16.0) / 116.0;
  const double fx = fy + lab.a / 500.0;
  const double fz = fy - lab.b / 200.0;
  const std::array<double, 3> xyz{lab_f_inv(fx) * kWhiteX, lab_f_inv(fy) * kWhiteY,
                                  lab_f_inv(fz) * kWhiteZ};
  std::array<double, 3> rgb{};
  for (std::size_t i = 0; i < 3; ++i) {
    const double lin =
        kXyzToRgb[i][0] * xyz[0] + kXyzToRgb[i][1] * xyz[1] + kXyzToRgb[i][2] * xyz[2];
    rgb[i] = linear_to_srgb(std::clamp(lin, 0.0, 1.0));
  }
  return {to_channel(rgb[0]), to_channel(rgb[1]), to_channel(rgb[2])};
}

double delta_e(const LabColor& x, const LabColor& y) {
  const double dl = x.l - y.l;
  const double da = x.a - y.a;
  const double db = x.b - y.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

double rgb_distance(Color x, Color y) {
  const double dr = double(x.r) - y.r;
  const double dg = double(x.g) - y.g;
  const double db = double(x.b) - y.b;
  return std::sqrt(dr * dr + dg * dg + db * db);
}

}  // namespace colorgpt
