#pragma once

#include <filesystem>
#include <istream>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "colorgpt/color.hpp"
#include "colorgpt/embedding.hpp"

namespace colorgpt {

/// Lowercase, trim, collapse internal whitespace.
std::string normalize_word(std::string_view word);

/// Name -> color table in file order (xkcd rgb.txt layout). Immutable after
/// load except for the per-provider embedding cache, which is guarded.
class ColorDictionary {
 public:
  struct Entry {
    std::string word;
    Color color;
  };

  ColorDictionary() = default;
  ColorDictionary(const ColorDictionary& other);
  ColorDictionary& operator=(const ColorDictionary& other);

  /// Appends unless the normalized word is already present (first wins).
  bool add(std::string_view word, Color color);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Exact lookup of a normalized word.
  const Color* find(std::string_view word) const;

  /// Unit-normalized embeddings of every entry word for this provider,
  /// computed on first use.
  const std::vector<Vector>& word_embeddings(const EmbeddingProvider& provider) const;

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> lookup_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, std::vector<Vector>> embedding_cache_;
};

/// Reads "name<TAB>#rrggbb" lines. Blank lines and lines starting with '#'
/// are skipped; trailing whitespace after the hex code is ignored.
/// Throws ParseError naming the source and line number on malformed lines.
ColorDictionary load_dictionary(std::istream& in, std::string_view source_name = "<stream>");
ColorDictionary load_dictionary(const std::filesystem::path& path);

/// Default dictionary location relative to the working directory.
inline constexpr const char* kDefaultDictionaryPath = "data/xkcd_rgb.txt";

/// Exact match, else nearest by RGB Euclidean distance, ties to the earliest entry.
std::string hex_to_word(Color c, const ColorDictionary& dict);

/// One neighbor used by the reciprocal-distance blend.
struct BlendNeighbor {
  std::size_t entry;  // index into dict.entries()
  double distance;    // Euclidean distance between unit-normalized embeddings
  double weight;      // normalized 1/distance
};

/// The 5 dictionary words nearest to `word` in embedding space (distances
/// compared at 1e-6 resolution, ties broken by dictionary order). Weights
/// are only meaningful when no distance is zero.
std::vector<BlendNeighbor> blend_neighbors(std::string_view word, const ColorDictionary& dict,
                                           const EmbeddingProvider& embedder,
                                           std::size_t count = 5);

/// Dictionary words resolve directly (the embedder is not called). Other
/// words blend the colors of their 5 nearest dictionary words, weighted by
/// reciprocal embedding distance, rounded per channel.
Color word_to_hex(std::string_view word, const ColorDictionary& dict,
                  const EmbeddingProvider& embedder);

}  // namespace colorgpt
