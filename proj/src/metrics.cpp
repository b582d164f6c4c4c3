#include "colorgpt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "colorgpt/errors.hpp"

namespace colorgpt {
namespace {

std::vector<Color> filled_colors(const Palette& p, const char* what) {
  if (!p.fully_filled()) throw ValidationError(std::string(what) + ": palette has a masked slot");
  return p.colors();
}

}  // namespace

bool bins_match(std::span<const Color> predicted, std::span<const Color> ground_truth) {
  if (predicted.size() != ground_truth.size()) {
    throw ValidationError("bins_match: " + std::to_string(predicted.size()) + " predictions for " +
                          std::to_string(ground_truth.size()) + " ground-truth colors");
  }
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (quantize(predicted[i]) != quantize(ground_truth[i])) return false;
  }
  return true;
}

double bin_accuracy(std::span<const AccuracyCase> cases) {
  if (cases.empty()) throw ValidationError("bin_accuracy: no cases");
  std::size_t correct = 0;
  for (const auto& c : cases) correct += bins_match(c.predicted, c.ground_truth) ? 1 : 0;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(cases.size());
}

double distribution(std::span<const Color> colors) {
  if (colors.empty()) throw ValidationError("distribution: no colors");
  std::map<int, std::size_t> counts;
  for (Color c : colors) ++counts[quantize(c).flat()];
  const double n = static_cast<double>(colors.size());
  double h = 0.0;
  for (const auto& [bin, count] : counts) {
    const double p = static_cast<double>(count) / n;
    h -= p * std::log(p);
  }
  // A single bin yields -1 * log(1) = -0.0.
  return h == 0.0 ? 0.0 : h;
}

std::string_view to_string(SimilarityStrategy s) {
  return s == SimilarityStrategy::MinAssignment ? "min_assignment" : "chamfer";
}

std::string_view to_string(DistanceSpace s) { return s == DistanceSpace::Lab ? "lab" : "rgb"; }

SimilarityStrategy parse_similarity_strategy(std::string_view name) {
  if (name == "min_assignment") return SimilarityStrategy::MinAssignment;
  if (name == "chamfer") return SimilarityStrategy::Chamfer;
  throw ValidationError("unknown similarity strategy '" + std::string(name) + "'");
}

DistanceSpace parse_distance_space(std::string_view name) {
  if (name == "lab" || name == "cielab") return DistanceSpace::Lab;
  if (name == "rgb") return DistanceSpace::Rgb;
  throw ValidationError("unknown distance space '" + std::string(name) + "'");
}

double color_distance(Color a, Color b, DistanceSpace space) {
  return space == DistanceSpace::Lab ? delta_e(a, b) : rgb_distance(a, b);
}

double palette_similarity(const Palette& p, const Palette& q, SimilarityStrategy strategy,
                          DistanceSpace space) {
  auto a = filled_colors(p, "palette_similarity");
  auto b = filled_colors(q, "palette_similarity");
  if (a.empty() || b.empty() || a.size() > kMaxPaletteSize || b.size() > kMaxPaletteSize) {
    throw ValidationError("palette_similarity: palettes must hold 1 to 5 colors");
  }
  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  const std::size_t n = b.size();

  std::vector<double> d(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i * n + j] = color_distance(a[i], b[j], space);
  }

  if (strategy == SimilarityStrategy::Chamfer) {
    double ab = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      ab += *std::min_element(d.begin() + static_cast<std::ptrdiff_t>(i * n),
                              d.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
    }
    double ba = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m; ++i) best = std::min(best, d[i * n + j]);
      ba += best;
    }
    return 0.5 * (ab / static_cast<double>(m) + ba / static_cast<double>(n));
  }

  // Odometer over every map from a's positions onto b's; at most 5^5 maps.
  std::vector<std::size_t> pick(m, 0);
  std::vector<int> used(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::fill(used.begin(), used.end(), 0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      used[pick[i]] = 1;
      total += d[i * n + pick[i]];
    }
    if (std::all_of(used.begin(), used.end(), [](int u) { return u != 0; })) best = std::min(best, total);
    std::size_t pos = 0;
    while (pos < m && ++pick[pos] == n) pick[pos++] = 0;
    if (pos == m) break;
  }
  return best / static_cast<double>(m);
}

double palette_diversity(const Palette& p, DistanceSpace space) {
  const auto c = filled_colors(p, "palette_diversity");
  if (c.size() < 2) throw ValidationError("palette_diversity: needs at least 2 colors");
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j, ++pairs) total += color_distance(c[i], c[j], space);
  }
  return total / static_cast<double>(pairs);
}

SummaryStat summarize(std::span<const double> values) {
  SummaryStat s;
  s.n = values.size();
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

}  // namespace colorgpt
