#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace colorgpt {

using Vector = std::vector<float>;

/// Turns texts into fixed-dimension vectors. Implementations must be safe to
/// call concurrently and must return one vector per input, in input order.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<Vector> embed(std::span<const std::string> texts) const = 0;

  Vector embed_one(const std::string& text) const;
};

/// Offline, fully deterministic embedder: hashed character 3-gram term
/// frequencies, L2-normalized. Texts with no 3-grams map to basis vector e0.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 256;

  explicit HashingEmbedder(std::size_t dimension = kDefaultDimension);

  std::string name() const override;
  std::size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

 private:
  std::size_t dimension_;
};

/// Convenience wrapper over HashingEmbedder with the default dimension.
std::vector<Vector> fallback_embed(std::span<const std::string> texts);

struct RemoteEmbedderConfig {
  std::string url;    // full endpoint, e.g. https://host/v1/embeddings
  std::string api_key;
  std::string model;
  std::size_t dimension = 0;  // 0: learned from the first response
  std::size_t batch_size = 64;
  std::size_t parallelism = 4;
  double timeout_s = 60.0;

  /// Fills url/api_key from EMBED_API_URL / EMBED_API_KEY when empty.
  static RemoteEmbedderConfig from_env(RemoteEmbedderConfig base);
};

/// HTTP embedder: POST {model, input:[...]} -> {data:[{embedding:[...]}]}.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(RemoteEmbedderConfig cfg);

  std::string name() const override { return "remote:" + cfg_.model; }
  std::size_t dimension() const override;
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

 private:
  std::vector<Vector> embed_batch(std::span<const std::string> texts) const;

  RemoteEmbedderConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::size_t learned_dimension_ = 0;
};

/// Memoizes another provider and optionally persists the cache as JSON Lines
/// ({"text":..., "vector":[...]}) so remote embeddings replay offline.
class CachingEmbedder final : public EmbeddingProvider {
 public:
  explicit CachingEmbedder(std::shared_ptr<const EmbeddingProvider> inner,
                           std::filesystem::path cache_file = {});

  std::string name() const override { return inner_->name(); }
  std::size_t dimension() const override { return inner_->dimension(); }
  std::vector<Vector> embed(std::span<const std::string> texts) const override;

  std::size_t cached() const;
  /// Writes the whole cache, sorted by text, to the cache file.
  void save() const;

 private:
  std::shared_ptr<const EmbeddingProvider> inner_;
  std::filesystem::path cache_file_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, Vector> cache_;
};

/// In-place L2 normalization; zero vectors are left untouched. Returns the
/// original norm.
double normalize(Vector& v);
double dot(std::span<const float> a, std::span<const float> b);

}  // namespace colorgpt
