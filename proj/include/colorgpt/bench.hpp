#pragma once

#include <functional>
#include <span>
#include <vector>

#include "colorgpt/config.hpp"
#include "colorgpt/document.hpp"
#include "colorgpt/ingest.hpp"
#include "colorgpt/report.hpp"
#include "colorgpt/retrieval.hpp"

namespace colorgpt {

/// Process exit codes of the CLI.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitProvider = 3, kExitIncomplete = 4 };

/// One (document, k) completion case. The mask seed is derived from the
/// global seed, the document id and k.
struct CompletionCase {
  std::string id;  // "<document id>#<k>"
  Document masked;
  MaskRecord record;
  std::string element_kind;  // of the masked slots; "mixed" when they differ
};

/// Every case for `docs` and each k in `mask_counts`. Documents with fewer
/// than k filled slots are skipped for that k.
std::vector<CompletionCase> make_completion_cases(std::span<const Document> docs, std::span<const int> mask_counts,
                                                  std::uint64_t seed);

/// Exemplar corpora: documents keyed by their query text, and PAT pairs
/// keyed by their description.
std::vector<CorpusItem> completion_corpus(std::span<const Document> docs);
std::vector<CorpusItem> generation_corpus(std::span<const PatPair> pairs);

/// Runs fn(i) for i in [0, n) on up to `parallel` threads. The first
/// exception thrown by any call is rethrown after all threads finish.
void parallel_for(std::size_t n, int parallel, const std::function<void(std::size_t)>& fn);

/// Every arm of the config over the test split. Reports are deterministic
/// for mock and replay providers regardless of `parallel`.
MetricsReport run_completion(const RunConfig& cfg);
MetricsReport run_generation(const RunConfig& cfg);

/// kExitIncomplete when any case hit a provider failure, else kExitOk.
int exit_code(const MetricsReport& report);

}  // namespace colorgpt
