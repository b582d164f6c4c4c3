#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "colorgpt/config.hpp"
#include "colorgpt/document.hpp"
#include "colorgpt/llm.hpp"
#include "colorgpt/naming.hpp"
#include "colorgpt/prompting.hpp"
#include "colorgpt/report.hpp"
#include "colorgpt/retrieval.hpp"
#include "colorgpt/templates.hpp"

namespace colorgpt {

/// Shared, read-only resources for running prompts against a provider.
/// Every member must outlive the pipeline calls that use it.
struct PipelineContext {
  std::shared_ptr<ChatProvider> provider;
  /// Set when the provider is a mock that should answer from the ground
  /// truth (echo) or a fixed color; the pipeline registers the expected
  /// reply under each request fingerprint before sending it.
  std::shared_ptr<MockProvider> oracle;
  MockConfig mock;

  const ColorDictionary* dictionary = nullptr;  // needed by Word / WordHex
  const EmbeddingProvider* embedder = nullptr;  // retrieval and word blending
  const ExemplarIndex* index = nullptr;         // may be null or empty
  const TemplateSet* templates = nullptr;       // null: built-in
  RateLimiter* limiter = nullptr;
  int repair_attempts = 2;
  std::uint64_t seed = 0;

  const TemplateSet& template_set() const;
};

/// Result of one prompt/parse exchange, including repairs.
template <typename T>
struct Outcome {
  CaseStatus status = CaseStatus::Ok;
  std::optional<T> value;
  std::string exemplar_id;
  int requests = 0;
  std::string error;
  PromptBundle prompt;
};

/// Exemplars for a case under the configured policy. The exemplar whose id
/// equals `exclude_id` (the case itself) is never chosen. Random selection
/// is seeded from (ctx.seed, case_key).
std::vector<Exemplar> select_exemplars(const PipelineContext& ctx, const PromptConfig& cfg,
                                       const std::string& query_text, const std::string& exclude_id,
                                       const std::string& case_key);

/// Suggests colors for every masked slot of `masked`, in document order.
/// `truth` (the ground truth per masked slot) is only used to answer in
/// echo mode. ConfigError propagates; other provider errors become a
/// ProviderFailure outcome, unusable replies a ParseFailure after repairs.
Outcome<std::vector<Color>> complete_document(const PipelineContext& ctx, const Document& masked,
                                              const PromptConfig& cfg, const std::string& case_key,
                                              std::span<const Color> truth = {});

/// Five colors for `text`. `truth` is only used in echo mode.
Outcome<std::vector<Color>> generate_palette(const PipelineContext& ctx, const std::string& text,
                                             const PromptConfig& cfg, const std::string& case_key,
                                             const std::string& exclude_id = {},
                                             std::span<const Color> truth = {});

/// Resources built from a RunConfig: dictionary, embedder, templates,
/// provider and rate limiter. Owns everything a PipelineContext points to
/// except the exemplar index.
class PipelineResources {
 public:
  explicit PipelineResources(const RunConfig& cfg, bool need_dictionary);

  /// Context for one arm; `model` overrides the configured model name.
  PipelineContext context(const ExemplarIndex* index, const std::optional<std::string>& model = {});

  const ColorDictionary& dictionary() const { return dictionary_; }
  const EmbeddingProvider& embedder() const { return *embedder_; }
  const TemplateSet& templates() const { return *templates_; }
  std::shared_ptr<MockProvider> mock() const { return mock_; }

 private:
  std::shared_ptr<ChatProvider> provider_for(const std::optional<std::string>& model);

  RunConfig cfg_;
  ColorDictionary dictionary_;
  std::shared_ptr<const EmbeddingProvider> embedder_;
  std::unique_ptr<TemplateSet> templates_;
  std::shared_ptr<MockProvider> mock_;
  std::map<std::string, std::shared_ptr<ChatProvider>> providers_;
  std::unique_ptr<RateLimiter> limiter_;
};

}  // namespace colorgpt
