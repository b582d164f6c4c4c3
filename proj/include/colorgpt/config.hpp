#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "colorgpt/color.hpp"
#include "colorgpt/embedding.hpp"
#include "colorgpt/llm.hpp"
#include "colorgpt/metrics.hpp"
#include "colorgpt/prompting.hpp"

namespace colorgpt {

/// How the mock chat provider answers.
///
///   echo      the ground truth of the case, in the arm's representation
///   fixed     `fixed_color` in every masked slot / `fixed_palette`
///   fixtures  replies from a fixture file, misses fall back to `default_reply`
///             (or fail when `strict`)
struct MockConfig {
  enum class Mode { Echo, Fixed, Fixtures };

  Mode mode = Mode::Echo;
  Color fixed_color{0x12, 0x34, 0x56};
  std::vector<Color> fixed_palette{{0x20, 0x20, 0x20}, {0x50, 0x50, 0x50}, {0x80, 0x80, 0x80},
                                   {0xb0, 0xb0, 0xb0}, {0xe0, 0xe0, 0xe0}};
  std::filesystem::path fixtures;
  std::string default_reply;
  bool strict = true;
};

std::string_view to_string(MockConfig::Mode m);

struct EmbedderConfig {
  enum class Kind { Hashing, Remote };

  Kind kind = Kind::Hashing;
  std::size_t dimension = HashingEmbedder::kDefaultDimension;
  RemoteEmbedderConfig remote;
  std::filesystem::path cache;  // JSON Lines cache for remote vectors
};

/// One named prompt configuration of an ablation run. `model` overrides the
/// provider's model name when set.
struct ArmConfig {
  std::string name;
  PromptConfig prompt;
  std::optional<std::string> model;
};

/// Everything a benchmark run or the service needs. Relative paths in a
/// config file are resolved against the file's directory.
struct RunConfig {
  PromptConfig::Task task = PromptConfig::Task::Completion;
  PromptConfig prompt;
  std::vector<ArmConfig> arms;  // empty: a single arm named "default"

  LlmProviderConfig llm;
  MockConfig mock;
  EmbedderConfig embedder;

  std::filesystem::path corpus;    // completion JSON Lines
  std::filesystem::path manifest;  // completion split manifest
  std::filesystem::path pat;       // generation pairs
  std::filesystem::path index;     // prebuilt exemplar index (optional)
  std::filesystem::path dictionary;
  std::filesystem::path templates;  // empty: built-in templates
  std::filesystem::path output_dir;
  std::filesystem::path record;
  std::filesystem::path replay;

  std::string split = "test";
  std::string exemplar_split = "train";
  std::uint64_t seed = 0;
  std::uint64_t pat_split_seed = 0;
  std::vector<int> mask_counts{1, 2, 3};
  std::size_t max_cases = 0;  // 0: all
  int parallel = 4;
  double rate_limit_per_minute = 0.0;
  int repair_attempts = 2;
  SimilarityStrategy similarity = SimilarityStrategy::MinAssignment;
  DistanceSpace space = DistanceSpace::Lab;

  /// Throws ValidationError on unknown keys or bad values.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static RunConfig load(const std::filesystem::path& path);

  /// The arms to run: `arms`, or one "default" arm made from `prompt`.
  std::vector<ArmConfig> resolved_arms() const;

  /// Checks value ranges and that every referenced input path exists.
  void validate() const;

  /// Settings recorded in report metadata (no secrets).
  nlohmann::ordered_json to_json() const;
};

/// Arm name derived from the fields that differ from `base`, e.g.
/// "representation=cielab,profile=long"; "default" when nothing differs.
std::string arm_name(const PromptConfig& arm, const PromptConfig& base);

}  // namespace colorgpt
