#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "colorgpt/embedding.hpp"

namespace colorgpt {

/// A solved training case that can be shown to the model in-context.
struct Exemplar {
  std::string id;
  std::string query_text;
  std::string payload;  // canonical JSON: a document, or {"text", "palette"}
  Vector vector;        // unit-normalized

  friend bool operator==(const Exemplar&, const Exemplar&) = default;
};

struct CorpusItem {
  std::string id;
  std::string query_text;
  std::string payload;
};

struct Hit {
  const Exemplar* exemplar;
  double score;  // cosine similarity in [-1, 1]
};

struct BuildOptions {
  std::size_t batch_size = 64;
  std::size_t parallelism = 4;  // batches in flight
};

/// Exact (exhaustive) cosine-similarity index. Immutable once built.
class ExemplarIndex {
 public:
  ExemplarIndex() = default;

  const std::string& provider_name() const { return provider_name_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return exemplars_.size(); }
  bool empty() const { return exemplars_.empty(); }
  const std::vector<Exemplar>& exemplars() const { return exemplars_; }
  const Exemplar* find(std::string_view id) const;

  /// Ranked by descending cosine (compared at 1e-6 resolution), ties by
  /// ascending id; min(k, size()) hits.
  std::vector<Hit> query_top_k(const EmbeddingProvider& provider, const std::string& text,
                               std::size_t k) const;
  std::vector<Hit> query_vector(std::span<const float> query, std::size_t k) const;

  /// Uniform, deterministic per seed.
  const Exemplar& sample_random(std::uint64_t seed) const;

  /// Binary container: "CGIDX1" magic, provider, dimension, ids, query
  /// texts, payload offsets, payload blob, float32 vectors. Little-endian.
  void save(const std::filesystem::path& path) const;
  std::string to_bytes() const;
  static ExemplarIndex load(const std::filesystem::path& path);
  static ExemplarIndex from_bytes(std::string_view bytes);

  friend ExemplarIndex build_index(std::span<const CorpusItem>, const EmbeddingProvider&,
                                   const BuildOptions&);

 private:
  std::string provider_name_;
  std::size_t dimension_ = 0;
  std::vector<Exemplar> exemplars_;
};

/// Embeds every query_text (batched, bounded parallelism) and normalizes.
/// Throws ValidationError on an empty corpus or duplicate ids.
ExemplarIndex build_index(std::span<const CorpusItem> corpus, const EmbeddingProvider& provider,
                          const BuildOptions& opts = {});

}  // namespace colorgpt
