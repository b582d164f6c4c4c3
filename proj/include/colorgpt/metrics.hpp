#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "colorgpt/color.hpp"
#include "colorgpt/document.hpp"

namespace colorgpt {

/// One completion case: predicted and ground-truth colors in slot order.
struct AccuracyCase {
  std::vector<Color> predicted;
  std::vector<Color> ground_truth;
};

/// True when every predicted color shares its 16x16x16 bin with the ground
/// truth at the same position. Throws ValidationError on a length mismatch.
bool bins_match(std::span<const Color> predicted, std::span<const Color> ground_truth);

/// Percentage of cases where bins_match holds. Throws ValidationError on an
/// empty input or any length mismatch.
double bin_accuracy(std::span<const AccuracyCase> cases);

/// Shannon entropy (nats) of the colors' empirical distribution over the
/// 16x16x16 bins. Throws ValidationError on an empty input.
double distribution(std::span<const Color> colors);

enum class SimilarityStrategy { MinAssignment, Chamfer };
enum class DistanceSpace { Lab, Rgb };

std::string_view to_string(SimilarityStrategy s);
std::string_view to_string(DistanceSpace s);
SimilarityStrategy parse_similarity_strategy(std::string_view name);
DistanceSpace parse_distance_space(std::string_view name);

/// Delta E in CIELAB, or Euclidean distance over 0..255 channels.
double color_distance(Color a, Color b, DistanceSpace space = DistanceSpace::Lab);

/// Mean matched distance between two palettes.
///
/// MinAssignment: the minimum, over every way of pairing each color of the
/// longer palette with a color of the shorter one such that every color of
/// the shorter palette is used, of the mean pair distance. With equal
/// lengths this is the minimum over permutations.
/// Chamfer: mean of the two directed nearest-neighbor means.
///
/// Both palettes must be fully filled with 1..5 colors; otherwise
/// ValidationError.
double palette_similarity(const Palette& p, const Palette& q,
                          SimilarityStrategy strategy = SimilarityStrategy::MinAssignment,
                          DistanceSpace space = DistanceSpace::Lab);

/// Mean distance over all unordered pairs of filled colors. Needs at least
/// two filled slots and no masked slot.
double palette_diversity(const Palette& p, DistanceSpace space = DistanceSpace::Lab);

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;

  friend bool operator==(const SummaryStat&, const SummaryStat&) = default;
};

SummaryStat summarize(std::span<const double> values);

}  // namespace colorgpt
