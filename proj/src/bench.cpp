#include "colorgpt/bench.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "colorgpt/errors.hpp"
#include "colorgpt/log.hpp"
#include "colorgpt/pipeline.hpp"
#include "colorgpt/prompting.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

using ojson = nlohmann::ordered_json;

bool any_needs_dictionary(const std::vector<ArmConfig>& arms) {
  for (const auto& a : arms) {
    const auto k = a.prompt.representation.kind;
    if (k == Representation::Kind::Word || k == Representation::Kind::WordHex) return true;
  }
  return false;
}

ExemplarIndex exemplar_index(const RunConfig& cfg, const EmbeddingProvider& embedder,
                             const std::function<std::vector<CorpusItem>()>& corpus) {
  ExemplarIndex index;
  if (!cfg.index.empty()) {
    index = ExemplarIndex::load(cfg.index);
    if (index.provider_name() != embedder.name()) {
      throw ValidationError("index " + cfg.index.string() + " was built with '" + index.provider_name() +
                            "' but the configured embedder is '" + embedder.name() + "'");
    }
  } else {
    const auto items = corpus();
    if (items.empty()) {
      log_warn("exemplar split is empty; prompts carry no exemplar");
      return index;
    }
    BuildOptions opts;
    opts.parallelism = static_cast<std::size_t>(std::max(1, cfg.parallel));
    index = build_index(items, embedder, opts);
  }
  log_info("exemplar index: " + std::to_string(index.size()) + " items");
  return index;
}

ojson base_metadata(const RunConfig& cfg, const PipelineResources& res, const ExemplarIndex& index) {
  ojson m;
  m["config"] = cfg.to_json();
  m["template_hash"] = res.templates().hash();
  m["embedder"] = res.embedder().name();
  m["index_size"] = index.size();
  m["dictionary_size"] = res.dictionary().size();
  m["decisions"] = {
      "accuracy: every masked color must share its 16x16x16 RGB bin with the ground truth",
      "distribution: Shannon entropy in nats over the 16x16x16 bins",
      "similarity: " + std::string(to_string(cfg.similarity)) + " mean distance in " +
          std::string(to_string(cfg.space)) + ", chamfer reported alongside",
      "diversity: mean pairwise distance in " + std::string(to_string(cfg.space)),
      "unusable replies: up to " + std::to_string(cfg.repair_attempts) + " repair requests, then scored incorrect",
      "one masking per (document, k) seeded from (seed, document id, k)",
  };
  return m;
}

}  // namespace

std::vector<CompletionCase> make_completion_cases(std::span<const Document> docs, std::span<const int> mask_counts,
                                                  std::uint64_t seed) {
  std::vector<CompletionCase> cases;
  for (int k : mask_counts) {
    for (const auto& d : docs) {
      if (d.filled_count() < static_cast<std::size_t>(k)) {
        log_debug("document '" + d.id + "' has fewer than " + std::to_string(k) + " colors; skipped");
        continue;
      }
      CompletionCase c;
      c.id = d.id + "#" + std::to_string(k);
      auto [masked, record] = mask_palette(d, k, derive_seed(seed, d.id, static_cast<std::uint64_t>(k)));
      c.masked = std::move(masked);
      c.record = std::move(record);
      for (const auto& t : c.record.targets()) {
        const auto kind = std::string(to_string(c.masked.find_element(t.element_id)->kind));
        c.element_kind = c.element_kind.empty() || c.element_kind == kind ? kind : "mixed";
      }
      cases.push_back(std::move(c));
    }
  }
  return cases;
}

std::vector<CorpusItem> completion_corpus(std::span<const Document> docs) {
  std::vector<CorpusItem> items;
  items.reserve(docs.size());
  for (const auto& d : docs) items.push_back({d.id, derive_query_text(d), serialize_document(d)});
  return items;
}

std::vector<CorpusItem> generation_corpus(std::span<const PatPair> pairs) {
  std::vector<CorpusItem> items;
  items.reserve(pairs.size());
  for (const auto& p : pairs) items.push_back({p.id, p.text, generation_payload(p.text, p.palette)});
  return items;
}

void parallel_for(std::size_t n, int parallel, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallel)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < n && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          failed = true;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

MetricsReport run_completion(const RunConfig& cfg) {
  if (cfg.task != PromptConfig::Task::Completion) throw ValidationError("run_completion: task is not completion");
  cfg.validate();
  const auto arms = cfg.resolved_arms();
  PipelineResources res(cfg, any_needs_dictionary(arms));

  const auto docs = ingest_completion_corpus(cfg.corpus);
  const auto manifest = load_split_manifest(cfg.manifest);
  auto test_docs = select_split(docs, manifest, cfg.split);
  if (cfg.max_cases > 0 && test_docs.size() > cfg.max_cases) test_docs.resize(cfg.max_cases);
  const auto index = exemplar_index(cfg, res.embedder(), [&] {
    return completion_corpus(select_split(docs, manifest, cfg.exemplar_split));
  });
  const auto cases = make_completion_cases(test_docs, cfg.mask_counts, cfg.seed);
  log_info("completion: " + std::to_string(cases.size()) + " cases x " + std::to_string(arms.size()) + " arms");

  MetricsReport report;
  report.task = "completion";
  report.metadata = base_metadata(cfg, res, index);
  report.metadata["test_documents"] = test_docs.size();

  for (const auto& arm_cfg : arms) {
    ArmReport arm;
    arm.name = arm_cfg.name;
    arm.prompt = arm_cfg.prompt.to_json();
    if (arm_cfg.model) arm.prompt["model"] = *arm_cfg.model;
    arm.cases.resize(cases.size());
    const PipelineContext ctx = res.context(&index, arm_cfg.model);
    parallel_for(cases.size(), cfg.parallel, [&](std::size_t i) {
      const auto& c = cases[i];
      const auto truth = c.record.ground_truth();
      auto out = complete_document(ctx, c.masked, arm_cfg.prompt, c.id, truth);
      CaseResult& r = arm.cases[i];
      r.case_id = c.id;
      r.document_id = c.masked.id;
      r.k = static_cast<int>(c.record.k());
      r.element_kind = c.element_kind;
      r.exemplar_id = out.exemplar_id;
      r.status = out.status;
      r.requests = out.requests;
      r.ground_truth = truth;
      if (out.value) r.predicted = *out.value;
      r.error = out.error;
    });
    summarize_completion(arm);
    log_info("arm " + arm.name + " done");
    report.arms.push_back(std::move(arm));
  }
  return report;
}

MetricsReport run_generation(const RunConfig& cfg) {
  if (cfg.task != PromptConfig::Task::Generation) throw ValidationError("run_generation: task is not generation");
  cfg.validate();
  const auto arms = cfg.resolved_arms();
  PipelineResources res(cfg, any_needs_dictionary(arms));

  const auto pairs = ingest_pat(cfg.pat, cfg.pat_split_seed);
  auto test_pairs = pat_split(pairs, cfg.split);
  if (cfg.max_cases > 0 && test_pairs.size() > cfg.max_cases) test_pairs.resize(cfg.max_cases);
  const auto index = exemplar_index(cfg, res.embedder(), [&] {
    return generation_corpus(pat_split(pairs, cfg.exemplar_split));
  });

  MetricsReport report;
  report.task = "generation";
  report.metadata = base_metadata(cfg, res, index);
  report.metadata["test_pairs"] = test_pairs.size();

  for (const auto& arm_cfg : arms) {
    ArmReport arm;
    arm.name = arm_cfg.name;
    arm.prompt = arm_cfg.prompt.to_json();
    if (arm_cfg.model) arm.prompt["model"] = *arm_cfg.model;
    arm.cases.resize(test_pairs.size());
    const PipelineContext ctx = res.context(&index, arm_cfg.model);
    parallel_for(test_pairs.size(), cfg.parallel, [&](std::size_t i) {
      const auto& p = test_pairs[i];
      auto out = generate_palette(ctx, p.text, arm_cfg.prompt, p.id, p.id, p.palette);
      CaseResult& r = arm.cases[i];
      r.case_id = p.id;
      r.document_id = p.id;
      r.exemplar_id = out.exemplar_id;
      r.status = out.status;
      r.requests = out.requests;
      r.ground_truth.assign(p.palette.begin(), p.palette.end());
      if (out.value) r.predicted = *out.value;
      r.error = out.error;
    });
    summarize_generation(arm, cfg.similarity, cfg.space);
    log_info("arm " + arm.name + " done");
    report.arms.push_back(std::move(arm));
  }
  return report;
}

int exit_code(const MetricsReport& report) { return report.incomplete() ? kExitIncomplete : kExitOk; }

}  // namespace colorgpt
