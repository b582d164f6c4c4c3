#include "colorgpt/naming.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "colorgpt/errors.hpp"

namespace colorgpt {

std::string normalize_word(std::string_view word) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : word) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

ColorDictionary::ColorDictionary(const ColorDictionary& other)
    : entries_(other.entries_), lookup_(other.lookup_) {}

ColorDictionary& ColorDictionary::operator=(const ColorDictionary& other) {
  if (this != &other) {
    entries_ = other.entries_;
    lookup_ = other.lookup_;
    std::lock_guard lock(cache_mutex_);
    embedding_cache_.clear();
  }
  return *this;
}

bool ColorDictionary::add(std::string_view word, Color color) {
  auto key = normalize_word(word);
  if (key.empty()) throw ValidationError("color dictionary word is empty");
  if (lookup_.contains(key)) return false;
  lookup_.emplace(key, entries_.size());
  entries_.push_back({std::move(key), color});
  std::lock_guard lock(cache_mutex_);
  embedding_cache_.clear();
  return true;
}

const Color* ColorDictionary::find(std::string_view word) const {
  auto it = lookup_.find(normalize_word(word));
  return it == lookup_.end() ? nullptr : &entries_[it->second].color;
}

const std::vector<Vector>& ColorDictionary::word_embeddings(
    const EmbeddingProvider& provider) const {
  const auto key = provider.name();
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = embedding_cache_.find(key); it != embedding_cache_.end()) return it->second;
  }
  std::vector<std::string> words;
  words.reserve(entries_.size());
  for (const auto& e : entries_) words.push_back(e.word);
  auto vectors = provider.embed(words);
  if (vectors.size() != words.size()) {
    throw ProviderError(key + ": embedding count mismatch for dictionary words");
  }
  for (auto& v : vectors) normalize(v);
  std::lock_guard lock(cache_mutex_);
  // unordered_map references stay valid across later insertions
  return embedding_cache_.try_emplace(key, std::move(vectors)).first->second;
}

ColorDictionary load_dictionary(std::istream& in, std::string_view source_name) {
  ColorDictionary dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;

    const auto fail = [&](const std::string& why) {
      throw ParseError(std::string(source_name) + ":" + std::to_string(line_no) + ": " + why);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos) fail("expected 'name<TAB>#rrggbb'");
    std::string hex = line.substr(tab + 1);
    hex.erase(hex.find_last_not_of(" \t") + 1);
    hex.erase(0, hex.find_first_not_of(" \t"));
    Color color;
    try {
      color = hex_to_color(hex);
    } catch (const ParseError& e) {
      fail(e.what());
    }
    if (normalize_word(line.substr(0, tab)).empty()) fail("empty color name");
    dict.add(line.substr(0, tab), color);
  }
  if (in.bad()) throw IoError("error reading color dictionary " + std::string(source_name));
  return dict;
}

ColorDictionary load_dictionary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open color dictionary " + path.string());
  return load_dictionary(in, path.string());
}

std::string hex_to_word(Color c, const ColorDictionary& dict) {
  if (dict.empty()) throw ValidationError("hex_to_word: color dictionary is empty");
  const auto& entries = dict.entries();
  std::size_t best = 0;
  int best_d2 = std::numeric_limits<int>::max();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Color e = entries[i].color;
    const int dr = int(e.r) - c.r, dg = int(e.g) - c.g, db = int(e.b) - c.b;
    const int d2 = dr * dr + dg * dg + db * db;
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
      if (d2 == 0) break;
    }
  }
  return entries[best].word;
}

std::vector<BlendNeighbor> blend_neighbors(std::string_view word, const ColorDictionary& dict,
                                           const EmbeddingProvider& embedder, std::size_t count) {
  if (dict.empty()) throw ValidationError("word_to_hex: color dictionary is empty");
  const auto& table = dict.word_embeddings(embedder);
  Vector query = embedder.embed_one(normalize_word(word));
  normalize(query);

  std::vector<BlendNeighbor> all;
  all.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    double sq = 0.0;
    for (std::size_t d = 0; d < query.size(); ++d) {
      const double diff = double(query[d]) - table[i][d];
      sq += diff * diff;
    }
    all.push_back({i, std::sqrt(sq), 0.0});
  }
  // Ranked on a 1e-6 grid so float rounding cannot reorder exact ties.
  const auto rank = [](double d) { return std::llround(d * 1e6); };
  count = std::min(count, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count), all.end(),
                    [&](const BlendNeighbor& x, const BlendNeighbor& y) {
                      const auto rx = rank(x.distance), ry = rank(y.distance);
                      return rx != ry ? rx < ry : x.entry < y.entry;
                    });
  all.resize(count);

  double total = 0.0;
  for (const auto& n : all) total += n.distance > 0.0 ? 1.0 / n.distance : 0.0;
  for (auto& n : all) n.weight = (n.distance > 0.0 && total > 0.0) ? (1.0 / n.distance) / total : 0.0;
  return all;
}

Color word_to_hex(std::string_view word, const ColorDictionary& dict,
                  const EmbeddingProvider& embedder) {
  const auto key = normalize_word(word);
  if (key.empty()) throw ValidationError("word_to_hex: color word is empty");
  if (const Color* hit = dict.find(key)) return *hit;

  const auto neighbors = blend_neighbors(key, dict, embedder);
  const auto& entries = dict.entries();
  for (const auto& n : neighbors) {
    if (n.distance == 0.0) return entries[n.entry].color;
  }
  double r = 0.0, g = 0.0, b = 0.0;
  for (const auto& n : neighbors) {
    const Color c = entries[n.entry].color;
    r += n.weight * c.r;
    g += n.weight * c.g;
    b += n.weight * c.b;
  }
  const auto channel = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
  };
  return {channel(r), channel(g), channel(b)};
}

}  // namespace colorgpt
