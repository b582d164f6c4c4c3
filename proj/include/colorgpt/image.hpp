#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "colorgpt/color.hpp"
#include "colorgpt/document.hpp"

namespace colorgpt {

/// Row-major grid of opaque colors.
struct PixelGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Color> pixels;

  PixelGrid() = default;
  PixelGrid(std::size_t w, std::size_t h, Color fill = {})
      : width(w), height(h), pixels(w * h, fill) {}

  bool empty() const { return pixels.empty(); }
  Color& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  Color at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

struct ExtractOptions {
  std::size_t max_colors = 5;
  double min_delta_e = 10.0;
  std::size_t max_samples = 10000;  // distinct colors fed to k-means
  std::uint64_t seed = 0x636f6c6f72ULL;
  int max_iterations = 50;
};

/// Weighted k-means in CIELAB over the pixel histogram, then greedy merging
/// of clusters closer than min_delta_e into the heavier one. Output slots
/// are ordered by pixel share, heaviest first. The result depends only on
/// the multiset of pixel colors, not on their positions.
Palette extract_palette(const PixelGrid& grid, const ExtractOptions& opts = {});

/// Decodes PNG (8/16-bit, any color type) or uncompressed 24/32-bit BMP.
/// Alpha is dropped.
PixelGrid read_image(const std::filesystem::path& path);
void write_bmp(const PixelGrid& grid, const std::filesystem::path& path);

}  // namespace colorgpt
