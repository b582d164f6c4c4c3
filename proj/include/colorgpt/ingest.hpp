#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "colorgpt/color.hpp"
#include "colorgpt/document.hpp"

namespace colorgpt {

/// Share of invalid records above which ingestion aborts.
inline constexpr double kMaxInvalidFraction = 0.01;

/// Reads one document per line (blank lines ignored). Invalid lines are
/// skipped with a warning while they stay at or below `max_invalid` of all
/// records; beyond that a ValidationError lists the offending line numbers.
std::vector<Document> ingest_completion_corpus(std::istream& in, std::string_view source = "<stream>",
                                               double max_invalid = kMaxInvalidFraction);
std::vector<Document> ingest_completion_corpus(const std::filesystem::path& path,
                                               double max_invalid = kMaxInvalidFraction);

/// Split name -> document ids, read from {"train": [...], "test": [...]}.
/// "val" is accepted as an alias of "validation".
using SplitManifest = std::map<std::string, std::vector<std::string>>;
SplitManifest load_split_manifest(const std::filesystem::path& path);

/// Documents of one split, in manifest order. Ids missing from the corpus
/// are a ValidationError.
std::vector<Document> select_split(const std::vector<Document>& docs, const SplitManifest& manifest,
                                   const std::string& split);

struct PatPair {
  std::string id;
  std::string text;
  std::array<Color, 5> palette{};
  std::string split;  // "train", "validation" or "test"

  friend bool operator==(const PatPair&, const PatPair&) = default;
};

/// Reads text/palette pairs from CSV (header with `text` plus either a
/// `palette` column of five hex codes or `color1`..`color5`; optional `id`
/// and `split`) or JSON Lines ({"id", "text", "palette": [5 hex], "split"}).
/// The format follows the extension (.csv, otherwise JSON Lines).
///
/// Without split labels the pairs are shuffled with `split_seed` and the
/// first floor(n/10) become validation, the next floor(n/10) test, the
/// rest train. Invalid records follow the same threshold rule as the
/// completion corpus.
std::vector<PatPair> ingest_pat(const std::filesystem::path& path, std::uint64_t split_seed = 0,
                                double max_invalid = kMaxInvalidFraction);
std::vector<PatPair> ingest_pat_csv(std::istream& in, std::string_view source, std::uint64_t split_seed = 0,
                                    double max_invalid = kMaxInvalidFraction);
std::vector<PatPair> ingest_pat_jsonl(std::istream& in, std::string_view source,
                                      std::uint64_t split_seed = 0, double max_invalid = kMaxInvalidFraction);

std::vector<PatPair> pat_split(const std::vector<PatPair>& pairs, const std::string& split);

/// Splits one CSV record (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);

}  // namespace colorgpt
