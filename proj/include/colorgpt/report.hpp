#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "colorgpt/color.hpp"
#include "colorgpt/metrics.hpp"

namespace colorgpt {

enum class CaseStatus { Ok, ParseFailure, ProviderFailure };
std::string_view to_string(CaseStatus s);
CaseStatus parse_case_status(std::string_view name);

/// Outcome of one benchmark case. Predicted is empty unless status is Ok.
struct CaseResult {
  std::string case_id;
  std::string document_id;  // PAT pair id for generation
  int k = 0;                // 0 for generation
  std::string element_kind;  // completion only; "mixed" when the targets differ
  std::string exemplar_id;
  CaseStatus status = CaseStatus::Ok;
  int requests = 0;
  std::vector<Color> predicted;
  std::vector<Color> ground_truth;
  bool correct = false;      // completion
  double similarity = 0.0;   // generation, configured strategy
  double diversity = 0.0;    // generation, predicted palette
  std::string error;

  friend bool operator==(const CaseResult&, const CaseResult&) = default;
};

struct MaskCountStats {
  int k = 0;
  std::size_t cases = 0;
  std::size_t correct = 0;
  std::size_t parse_failures = 0;
  std::size_t provider_failures = 0;
  double accuracy = 0.0;         // percent, over all cases of this k
  double distribution = 0.0;     // of predicted colors
  double gt_distribution = 0.0;  // of ground-truth colors

  friend bool operator==(const MaskCountStats&, const MaskCountStats&) = default;
};

struct ElementStats {
  std::string kind;
  std::size_t cases = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;  // percent
  double ratio = 0.0;     // percent of all cases

  friend bool operator==(const ElementStats&, const ElementStats&) = default;
};

/// Metrics of one prompt configuration. Numbers are stored rounded to two
/// decimals so that the JSON form round-trips exactly.
struct ArmReport {
  std::string name;
  nlohmann::ordered_json prompt = nlohmann::ordered_json::object();
  std::size_t total_cases = 0;
  std::size_t parse_failures = 0;
  std::size_t provider_failures = 0;
  std::size_t requests = 0;

  std::vector<MaskCountStats> by_mask_count;  // completion
  std::vector<ElementStats> by_element;       // completion, 1-color masks only

  SummaryStat similarity;           // generation, configured strategy
  SummaryStat similarity_chamfer;   // generation, side-by-side
  SummaryStat diversity;            // generation, predicted palettes
  SummaryStat gt_diversity;         // generation, ground-truth palettes

  std::vector<CaseResult> cases;

  bool incomplete() const { return provider_failures > 0; }
  friend bool operator==(const ArmReport&, const ArmReport&) = default;
};

struct MetricsReport {
  std::string task;  // "completion" or "generation"
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();
  std::vector<ArmReport> arms;

  bool incomplete() const;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Aggregates finished completion cases into an arm. The per-element
/// breakdown covers the k = 1 cases only.
void summarize_completion(ArmReport& arm);
/// Scores finished generation cases (similarity to the ground truth under
/// `strategy`, diversity of the prediction) and aggregates them into an arm.
void summarize_generation(ArmReport& arm, SimilarityStrategy strategy, DistanceSpace space);

nlohmann::ordered_json to_json(const MetricsReport& r);
MetricsReport report_from_json(const nlohmann::ordered_json& j);

/// Table layouts. Completion: table1 (accuracy and distribution by mask
/// count) and table2 (accuracy and share by element type). Generation:
/// table4 (similarity and diversity mean/std per arm).
std::string table1_csv(const MetricsReport& r);
std::string table2_csv(const MetricsReport& r);
std::string table4_csv(const MetricsReport& r);
/// Predicted vs ground-truth swatches per case, one section per arm.
std::string swatch_html(const MetricsReport& r);

struct ReportFormats {
  bool json = true;
  bool csv = true;
  bool html = true;
};

/// Writes report.json, the CSV tables that apply to the task and
/// report.html into `dir` (created if missing). Returns the written paths.
/// Throws IoError if anything cannot be written.
std::vector<std::filesystem::path> emit_report(const MetricsReport& r,
                                               const std::filesystem::path& dir,
                                               const ReportFormats& formats = {});

}  // namespace colorgpt
