#include "colorgpt/image.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>
#include <limits>
#include <png.h>

#include "colorgpt/errors.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

struct Bucket {
  Color color;
  std::size_t count;
  LabColor lab;
};

double dist2(const LabColor& x, const LabColor& y) {
  const double dl = x.l - y.l, da = x.a - y.a, db = x.b - y.b;
  return dl * dl + da * da + db * db;
}

std::size_t nearest(const LabColor& p, const std::vector<LabColor>& centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = dist2(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

std::vector<LabColor> kmeans(const std::vector<Bucket>& samples, std::size_t k,
                             const ExtractOptions& opts) {
  Rng rng(opts.seed);
  std::vector<LabColor> centers;
  centers.reserve(k);

  // k-means++ seeding with count-weighted D^2 sampling
  std::vector<double> d2(samples.size(), 0.0);
  const auto pick = [&](const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double target = rng.unit() * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      target -= weights[i];
      if (target < 0.0 && weights[i] > 0.0) return i;
    }
    for (std::size_t i = weights.size(); i-- > 0;) {
      if (weights[i] > 0.0) return i;
    }
    return std::size_t{0};
  };
  std::vector<double> w(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) w[i] = static_cast<double>(samples[i].count);
  centers.push_back(samples[pick(w)].lab);
  while (centers.size() < k) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centers) best = std::min(best, dist2(samples[i].lab, c));
      w[i] = best * static_cast<double>(samples[i].count);
    }
    centers.push_back(samples[pick(w)].lab);
  }

  std::vector<std::size_t> assignment(samples.size(), k);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const std::size_t c = nearest(samples[i].lab, centers);
      if (c != assignment[i]) {
        assignment[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::array<double, 4>> acc(k, {0, 0, 0, 0});
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double wt = static_cast<double>(samples[i].count);
      auto& a = acc[assignment[i]];
      a[0] += wt * samples[i].lab.l;
      a[1] += wt * samples[i].lab.a;
      a[2] += wt * samples[i].lab.b;
      a[3] += wt;
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (acc[c][3] > 0.0) centers[c] = {acc[c][0] / acc[c][3], acc[c][1] / acc[c][3], acc[c][2] / acc[c][3]};
    }
  }
  return centers;
}

std::uint32_t read_le(const unsigned char* p, int bytes) {
  std::uint32_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

void write_le(std::ostream& out, std::uint32_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

PixelGrid read_bmp(const std::filesystem::path& path, const std::vector<unsigned char>& data) {
  const auto fail = [&](const std::string& why) -> PixelGrid {
    throw ParseError(path.string() + ": " + why);
  };
  if (data.size() < 54 || data[0] != 'B' || data[1] != 'M') return fail("not a BMP file");
  const std::uint32_t offset = read_le(&data[10], 4);
  const auto width = static_cast<std::int32_t>(read_le(&data[18], 4));
  const auto raw_height = static_cast<std::int32_t>(read_le(&data[22], 4));
  const std::uint32_t bpp = read_le(&data[28], 2);
  const std::uint32_t compression = read_le(&data[30], 4);
  if (bpp != 24 && bpp != 32) return fail("only 24/32-bit BMP is supported");
  if (compression != 0 && !(compression == 3 && bpp == 32)) return fail("compressed BMP is not supported");
  if (width <= 0 || raw_height == 0) return fail("bad BMP dimensions");
  const bool top_down = raw_height < 0;
  const std::size_t w = static_cast<std::size_t>(width);
  const std::size_t h = static_cast<std::size_t>(top_down ? -std::int64_t(raw_height) : raw_height);
  const std::size_t bytes_pp = bpp / 8;
  const std::size_t stride = (w * bytes_pp + 3) / 4 * 4;
  if (offset + stride * h > data.size()) return fail("truncated BMP pixel data");

  PixelGrid grid(w, h);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = top_down ? row : h - 1 - row;
    const unsigned char* p = &data[offset + row * stride];
    for (std::size_t x = 0; x < w; ++x, p += bytes_pp) grid.at(x, y) = {p[2], p[1], p[0]};
  }
  return grid;
}

PixelGrid read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw ParseError(path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw ParseError(path.string() + ": " + image.message);
  }
  PixelGrid grid(image.width, image.height);
  for (std::size_t i = 0; i < grid.pixels.size(); ++i) {
    grid.pixels[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return grid;
}

}  // namespace

Palette extract_palette(const PixelGrid& grid, const ExtractOptions& opts) {
  if (grid.empty()) throw ValidationError("extract_palette: empty pixel grid");
  if (opts.max_colors < 1 || opts.max_colors > kMaxPaletteSize) {
    throw ValidationError("extract_palette: max_colors must be in [1, 5]");
  }

  std::vector<Color> sorted = grid.pixels;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Bucket> hist;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    hist.push_back({sorted[i], j - i, color_to_lab(sorted[i])});
    i = j;
  }

  struct Cluster {
    Color color;
    std::size_t weight;
  };
  std::vector<Cluster> clusters;
  if (hist.size() <= opts.max_colors) {
    for (const auto& b : hist) clusters.push_back({b.color, b.count});
  } else {
    std::vector<Bucket> samples;
    if (hist.size() <= opts.max_samples) {
      samples = hist;
    } else {
      for (std::size_t i = 0; i < opts.max_samples; ++i) {
        samples.push_back(hist[i * hist.size() / opts.max_samples]);
      }
    }
    const auto centers = kmeans(samples, opts.max_colors, opts);

    // final assignment over the full histogram
    std::vector<std::array<double, 4>> acc(centers.size(), {0, 0, 0, 0});
    std::vector<std::size_t> members(centers.size(), 0);
    std::vector<Color> sole(centers.size());
    for (const auto& b : hist) {
      const std::size_t c = nearest(b.lab, centers);
      const double wt = static_cast<double>(b.count);
      acc[c][0] += wt * b.lab.l;
      acc[c][1] += wt * b.lab.a;
      acc[c][2] += wt * b.lab.b;
      acc[c][3] += wt;
      ++members[c];
      sole[c] = b.color;
    }
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (members[c] == 0) continue;
      const Color color = members[c] == 1
                              ? sole[c]
                              : lab_to_color({acc[c][0] / acc[c][3], acc[c][1] / acc[c][3],
                                              acc[c][2] / acc[c][3]});
      clusters.push_back({color, static_cast<std::size_t>(acc[c][3])});
    }
  }

  const auto heavier = [](const Cluster& x, const Cluster& y) {
    return x.weight != y.weight ? x.weight > y.weight : x.color < y.color;
  };
  std::sort(clusters.begin(), clusters.end(), heavier);

  std::vector<Cluster> kept;
  for (const auto& c : clusters) {
    const LabColor lab = color_to_lab(c.color);
    Cluster* target = nullptr;
    double best = opts.min_delta_e;
    for (auto& k : kept) {
      const double d = delta_e(lab, color_to_lab(k.color));
      if (d < best) {
        best = d;
        target = &k;
      }
    }
    if (target) {
      target->weight += c.weight;
    } else {
      kept.push_back(c);
    }
  }
  std::sort(kept.begin(), kept.end(), heavier);
  if (kept.size() > opts.max_colors) kept.resize(opts.max_colors);

  Palette p;
  for (const auto& k : kept) p.slots.emplace_back(k.color);
  return p;
}

PixelGrid read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image " + path.string());
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  static constexpr unsigned char kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (data.size() >= 8 && std::equal(std::begin(kPngMagic), std::end(kPngMagic), data.begin())) {
    return read_png(path);
  }
  return read_bmp(path, data);
}

void write_bmp(const PixelGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  const std::size_t stride = (grid.width * 3 + 3) / 4 * 4;
  const auto image_size = static_cast<std::uint32_t>(stride * grid.height);
  out.put('B');
  out.put('M');
  write_le(out, 54 + image_size, 4);
  write_le(out, 0, 4);
  write_le(out, 54, 4);
  write_le(out, 40, 4);
  write_le(out, static_cast<std::uint32_t>(grid.width), 4);
  write_le(out, static_cast<std::uint32_t>(grid.height), 4);
  write_le(out, 1, 2);
  write_le(out, 24, 2);
  write_le(out, 0, 4);
  write_le(out, image_size, 4);
  write_le(out, 2835, 4);
  write_le(out, 2835, 4);
  write_le(out, 0, 4);
  write_le(out, 0, 4);
  for (std::size_t row = 0; row < grid.height; ++row) {
    const std::size_t y = grid.height - 1 - row;
    for (std::size_t x = 0; x < grid.width; ++x) {
      const Color c = grid.at(x, y);
      out.put(static_cast<char>(c.b));
      out.put(static_cast<char>(c.g));
      out.put(static_cast<char>(c.r));
    }
    for (std::size_t pad = grid.width * 3; pad < stride; ++pad) out.put(0);
  }
}

}  // namespace colorgpt
