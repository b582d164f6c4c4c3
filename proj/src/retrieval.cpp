#include "colorgpt/retrieval.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "colorgpt/errors.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

constexpr std::string_view kMagic = "CGIDX1";

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint64_t uint(int bytes) {
    need(static_cast<std::size_t>(bytes));
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in_[pos_ + i]);
    pos_ += static_cast<std::size_t>(bytes);
    return v;
  }
  std::string_view raw(std::size_t n) {
    need(n);
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::string str() { return std::string(raw(uint(4))); }
  float f32() { return std::bit_cast<float>(static_cast<std::uint32_t>(uint(4))); }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > in_.size()) throw ParseError("exemplar index: truncated data");
  }
  std::string_view in_;
  std::size_t pos_ = 0;
};

}  // namespace

const Exemplar* ExemplarIndex::find(std::string_view id) const {
  for (const auto& e : exemplars_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<Hit> ExemplarIndex::query_vector(std::span<const float> query, std::size_t k) const {
  if (empty()) throw ValidationError("query on an empty exemplar index");
  if (k == 0) throw ValidationError("query_top_k: k must be at least 1");
  if (query.size() != dimension_) {
    throw ValidationError("query dimension " + std::to_string(query.size()) +
                          " does not match index dimension " + std::to_string(dimension_));
  }
  Vector q(query.begin(), query.end());
  normalize(q);
  std::vector<Hit> hits;
  hits.reserve(exemplars_.size());
  for (const auto& e : exemplars_) {
    hits.push_back({&e, std::clamp(dot(q, e.vector), -1.0, 1.0)});
  }
  // Ranked on a 1e-6 grid so float rounding cannot reorder exact ties.
  const auto rank = [](double s) { return std::llround(s * 1e6); };
  k = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(k), hits.end(),
                    [&](const Hit& x, const Hit& y) {
                      const auto rx = rank(x.score), ry = rank(y.score);
                      return rx != ry ? rx > ry : x.exemplar->id < y.exemplar->id;
                    });
  hits.resize(k);
  return hits;
}

std::vector<Hit> ExemplarIndex::query_top_k(const EmbeddingProvider& provider,
                                            const std::string& text, std::size_t k) const {
  if (provider.name() != provider_name_) {
    throw ValidationError("index was built with provider '" + provider_name_ + "', not '" +
                          provider.name() + "'");
  }
  const Vector q = provider.embed_one(text);
  return query_vector(q, k);
}

const Exemplar& ExemplarIndex::sample_random(std::uint64_t seed) const {
  if (empty()) throw ValidationError("sample_random on an empty exemplar index");
  Rng rng(seed);
  return exemplars_[rng.below(exemplars_.size())];
}

std::string ExemplarIndex::to_bytes() const {
  Writer w;
  w.raw(kMagic);
  w.str(provider_name_);
  w.u32(static_cast<std::uint32_t>(dimension_));
  w.u64(exemplars_.size());
  std::uint64_t offset = 0;
  for (const auto& e : exemplars_) {
    w.str(e.id);
    w.str(e.query_text);
    w.u64(offset);
    w.u64(e.payload.size());
    offset += e.payload.size();
  }
  w.u64(offset);
  for (const auto& e : exemplars_) w.raw(e.payload);
  for (const auto& e : exemplars_) {
    for (float f : e.vector) w.f32(f);
  }
  return w.take();
}

ExemplarIndex ExemplarIndex::from_bytes(std::string_view bytes) {
  Reader r(bytes);
  if (r.raw(kMagic.size()) != kMagic) throw ParseError("exemplar index: bad magic header");
  ExemplarIndex idx;
  idx.provider_name_ = r.str();
  idx.dimension_ = r.uint(4);
  const std::uint64_t count = r.uint(8);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> spans;
  for (std::uint64_t i = 0; i < count; ++i) {
    Exemplar e;
    e.id = r.str();
    e.query_text = r.str();
    const auto off = r.uint(8);
    const auto len = r.uint(8);
    spans.emplace_back(off, len);
    idx.exemplars_.push_back(std::move(e));
  }
  const auto blob_size = r.uint(8);
  const std::string_view blob = r.raw(blob_size);
  for (std::size_t i = 0; i < idx.exemplars_.size(); ++i) {
    const auto [off, len] = spans[i];
    if (off + len > blob.size()) throw ParseError("exemplar index: payload offset out of range");
    idx.exemplars_[i].payload = std::string(blob.substr(off, len));
  }
  for (auto& e : idx.exemplars_) {
    e.vector.resize(idx.dimension_);
    for (auto& f : e.vector) f = r.f32();
  }
  if (!r.done()) throw ParseError("exemplar index: trailing bytes");
  return idx;
}

void ExemplarIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write exemplar index " + path.string());
  const auto bytes = to_bytes();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing exemplar index " + path.string());
}

ExemplarIndex ExemplarIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open exemplar index " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_bytes(ss.str());
}

ExemplarIndex build_index(std::span<const CorpusItem> corpus, const EmbeddingProvider& provider,
                          const BuildOptions& opts) {
  if (corpus.empty()) throw ValidationError("build_index: empty corpus");
  std::set<std::string_view> ids;
  for (const auto& item : corpus) {
    if (!ids.insert(item.id).second) {
      throw ValidationError("build_index: duplicate exemplar id '" + item.id + "'");
    }
  }

  std::vector<std::string> texts;
  texts.reserve(corpus.size());
  for (const auto& item : corpus) texts.push_back(item.query_text);

  const std::size_t batch = std::max<std::size_t>(1, opts.batch_size);
  const std::size_t parallel = std::max<std::size_t>(1, opts.parallelism);
  std::vector<Vector> vectors(texts.size());
  const std::span<const std::string> all(texts);
  for (std::size_t start = 0; start < texts.size(); start += batch * parallel) {
    std::vector<std::pair<std::size_t, std::future<std::vector<Vector>>>> wave;
    for (std::size_t b = 0; b < parallel; ++b) {
      const std::size_t s = start + b * batch;
      if (s >= texts.size()) break;
      const std::size_t n = std::min(batch, texts.size() - s);
      wave.emplace_back(s, std::async(std::launch::async,
                                      [&provider, chunk = all.subspan(s, n)] {
                                        return provider.embed(chunk);
                                      }));
    }
    for (auto& [s, fut] : wave) {
      auto got = fut.get();
      std::move(got.begin(), got.end(), vectors.begin() + static_cast<std::ptrdiff_t>(s));
    }
  }

  ExemplarIndex idx;
  idx.provider_name_ = provider.name();
  idx.dimension_ = vectors.front().size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (vectors[i].size() != idx.dimension_) {
      throw ProviderError(provider.name() + ": inconsistent embedding dimension");
    }
    normalize(vectors[i]);
    idx.exemplars_.push_back(
        {corpus[i].id, corpus[i].query_text, corpus[i].payload, std::move(vectors[i])});
  }
  return idx;
}

}  // namespace colorgpt
