#include "colorgpt/embedding.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <json.hpp>

#include "colorgpt/errors.hpp"
#include "colorgpt/log.hpp"
#include "colorgpt/rng.hpp"
#include "http_client.hpp"

namespace colorgpt {

using nlohmann::json;

Vector EmbeddingProvider::embed_one(const std::string& text) const {
  auto out = embed(std::span<const std::string>(&text, 1));
  if (out.size() != 1) throw ProviderError(name() + ": expected one embedding");
  return std::move(out.front());
}

double normalize(Vector& v) {
  double sq = 0.0;
  for (float x : v) sq += double(x) * x;
  const double norm = std::sqrt(sq);
  if (norm > 0.0) {
    for (float& x : v) x = static_cast<float>(x / norm);
  }
  return norm;
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) s += double(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------

HashingEmbedder::HashingEmbedder(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw ValidationError("embedding dimension must be positive");
}

std::string HashingEmbedder::name() const {
  return "hashing-3gram-" + std::to_string(dimension_);
}

std::vector<Vector> HashingEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) {
    // lowercase, collapse whitespace, pad with one space on each side
    std::string t = " ";
    for (unsigned char c : text) {
      if (std::isspace(c)) {
        if (t.back() != ' ') t.push_back(' ');
      } else {
        t.push_back(static_cast<char>(std::tolower(c)));
      }
    }
    if (t.back() != ' ') t.push_back(' ');

    Vector v(dimension_, 0.0f);
    for (std::size_t i = 0; i + 3 <= t.size(); ++i) {
      v[fnv1a64(std::string_view(t).substr(i, 3)) % dimension_] += 1.0f;
    }
    if (normalize(v) == 0.0) v[0] = 1.0f;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Vector> fallback_embed(std::span<const std::string> texts) {
  static const HashingEmbedder embedder;
  return embedder.embed(texts);
}

// ---------------------------------------------------------------------------

RemoteEmbedderConfig RemoteEmbedderConfig::from_env(RemoteEmbedderConfig base) {
  if (base.url.empty()) {
    if (const char* v = std::getenv("EMBED_API_URL")) base.url = v;
  }
  if (base.api_key.empty()) {
    if (const char* v = std::getenv("EMBED_API_KEY")) base.api_key = v;
  }
  return base;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.url.empty()) throw ConfigError("remote embedder needs an endpoint (EMBED_API_URL)");
  if (cfg_.batch_size == 0) cfg_.batch_size = 1;
  if (cfg_.parallelism == 0) cfg_.parallelism = 1;
}

std::size_t RemoteEmbedder::dimension() const {
  if (cfg_.dimension) return cfg_.dimension;
  std::lock_guard lock(mutex_);
  if (learned_dimension_ == 0) {
    throw ProviderError(name() + ": dimension unknown until the first embedding call");
  }
  return learned_dimension_;
}

std::vector<Vector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
  json body{{"model", cfg_.model}, {"input", json::array()}};
  for (const auto& t : texts) body["input"].push_back(t);

  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);
  const auto res = detail::post_json(cfg_.url, headers, body.dump(), cfg_.timeout_s);
  if (res.status == 401 || res.status == 403) {
    throw ConfigError(name() + ": authentication failed (HTTP " + std::to_string(res.status) + ")");
  }
  if (res.status != 200) {
    throw TransportError(name() + ": embedding request failed: " +
                         (res.status ? "HTTP " + std::to_string(res.status) : res.error));
  }
  std::vector<Vector> out;
  try {
    const auto reply = json::parse(res.body);
    for (const auto& item : reply.at("data")) out.push_back(item.at("embedding").get<Vector>());
  } catch (const json::exception& e) {
    throw ProviderError(name() + ": malformed embedding response: " + e.what());
  }
  if (out.size() != texts.size()) {
    throw ProviderError(name() + ": got " + std::to_string(out.size()) + " embeddings for " +
                        std::to_string(texts.size()) + " inputs");
  }
  const std::size_t dim = out.front().size();
  for (const auto& v : out) {
    if (v.size() != dim) throw ProviderError(name() + ": ragged embedding dimensions");
  }
  std::lock_guard lock(mutex_);
  if (cfg_.dimension && cfg_.dimension != dim) {
    throw ProviderError(name() + ": expected dimension " + std::to_string(cfg_.dimension) +
                        ", got " + std::to_string(dim));
  }
  learned_dimension_ = dim;
  return out;
}

std::vector<Vector> RemoteEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out(texts.size());
  if (texts.empty()) return out;

  // Batches go out with at most cfg_.parallelism requests in flight.
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < texts.size(); i += cfg_.batch_size) starts.push_back(i);
  for (std::size_t w = 0; w < starts.size(); w += cfg_.parallelism) {
    std::vector<std::future<std::vector<Vector>>> wave;
    const std::size_t wave_end = std::min(starts.size(), w + cfg_.parallelism);
    for (std::size_t b = w; b < wave_end; ++b) {
      const std::size_t n = std::min(cfg_.batch_size, texts.size() - starts[b]);
      wave.push_back(std::async(std::launch::async, [this, texts, s = starts[b], n] {
        return embed_batch(texts.subspan(s, n));
      }));
    }
    for (std::size_t b = w; b < wave_end; ++b) {
      auto vecs = wave[b - w].get();
      std::move(vecs.begin(), vecs.end(), out.begin() + static_cast<std::ptrdiff_t>(starts[b]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

CachingEmbedder::CachingEmbedder(std::shared_ptr<const EmbeddingProvider> inner,
                                 std::filesystem::path cache_file)
    : inner_(std::move(inner)), cache_file_(std::move(cache_file)) {
  if (cache_file_.empty() || !std::filesystem::exists(cache_file_)) return;
  std::ifstream in(cache_file_);
  if (!in) throw IoError("cannot read embedding cache " + cache_file_.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      cache_.emplace(j.at("text").get<std::string>(), j.at("vector").get<Vector>());
    } catch (const json::exception& e) {
      throw ParseError(cache_file_.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  log_info("loaded " + std::to_string(cache_.size()) + " cached embeddings from " +
           cache_file_.string());
}

std::vector<Vector> CachingEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<Vector> out(texts.size());
  std::vector<std::string> missing;
  std::vector<std::size_t> missing_at;
  {
    std::lock_guard lock(mutex_);
    for (std::size_t i = 0; i < texts.size(); ++i) {
      if (auto it = cache_.find(texts[i]); it != cache_.end()) {
        out[i] = it->second;
      } else {
        missing.push_back(texts[i]);
        missing_at.push_back(i);
      }
    }
  }
  if (missing.empty()) return out;
  auto fresh = inner_->embed(missing);
  std::lock_guard lock(mutex_);
  for (std::size_t j = 0; j < missing.size(); ++j) {
    // first writer wins so concurrent callers agree on one vector per text
    auto [it, inserted] = cache_.emplace(missing[j], std::move(fresh[j]));
    out[missing_at[j]] = it->second;
  }
  return out;
}

std::size_t CachingEmbedder::cached() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

void CachingEmbedder::save() const {
  if (cache_file_.empty()) return;
  std::vector<std::pair<std::string, Vector>> entries;
  {
    std::lock_guard lock(mutex_);
    entries.assign(cache_.begin(), cache_.end());
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::ofstream out(cache_file_, std::ios::trunc);
  if (!out) throw IoError("cannot write embedding cache " + cache_file_.string());
  for (const auto& [text, vec] : entries) {
    out << json{{"text", text}, {"vector", vec}}.dump() << '\n';
  }
}

}  // namespace colorgpt
