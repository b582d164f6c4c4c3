#include "colorgpt/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "colorgpt/errors.hpp"
#include "colorgpt/log.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

using json = nlohmann::json;

struct BadRecord {
  std::size_t line;
  std::string why;
};

void enforce_threshold(const std::vector<BadRecord>& bad, std::size_t total, std::string_view source,
                       double max_invalid) {
  if (bad.empty()) return;
  const bool abort = static_cast<double>(bad.size()) > max_invalid * static_cast<double>(total);
  std::string detail;
  for (std::size_t i = 0; i < bad.size() && i < 10; ++i) {
    detail += "\n  " + std::string(source) + ":" + std::to_string(bad[i].line) + ": " + bad[i].why;
  }
  if (bad.size() > 10) detail += "\n  ... and " + std::to_string(bad.size() - 10) + " more";
  const std::string summary = std::to_string(bad.size()) + " of " + std::to_string(total) +
                              " records invalid in " + std::string(source);
  if (abort) throw ValidationError(summary + detail);
  log_warn(summary + ", skipped" + detail);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string canonical_split(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  s = trim(s);
  if (s == "val" || s == "valid" || s == "dev") return "validation";
  if (s != "train" && s != "validation" && s != "test") throw ValidationError("unknown split '" + s + "'");
  return s;
}

std::array<Color, 5> five_colors(const std::vector<std::string>& hexes) {
  if (hexes.size() != 5) {
    throw ValidationError("expected 5 colors, got " + std::to_string(hexes.size()));
  }
  std::array<Color, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = hex_to_color(trim(hexes[i]));
  return out;
}

void assign_splits(std::vector<PatPair>& pairs, std::uint64_t seed, std::string_view source) {
  const auto labelled = std::count_if(pairs.begin(), pairs.end(), [](const PatPair& p) { return !p.split.empty(); });
  if (labelled == static_cast<std::ptrdiff_t>(pairs.size())) return;
  if (labelled != 0) throw ValidationError(std::string(source) + ": split labels present on some records only");

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  const std::size_t tenth = pairs.size() / 10;
  for (std::size_t r = 0; r < order.size(); ++r) {
    pairs[order[r]].split = r < tenth ? "validation" : r < 2 * tenth ? "test" : "train";
  }
  log_info(std::string(source) + ": seeded split (seed " + std::to_string(seed) + ")");
}

void check_unique_ids(const std::vector<PatPair>& pairs, std::string_view source) {
  std::unordered_map<std::string, int> seen;
  for (const auto& p : pairs) {
    if (++seen[p.id] > 1) throw ValidationError(std::string(source) + ": duplicate pair id '" + p.id + "'");
  }
}

}  // namespace

std::vector<Document> ingest_completion_corpus(std::istream& in, std::string_view source, double max_invalid) {
  std::vector<Document> docs;
  std::vector<BadRecord> bad;
  std::unordered_map<std::string, std::size_t> ids;
  std::string line;
  std::size_t lineno = 0, total = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++total;
    try {
      Document d = parse_document(line);
      if (d.masked_count() > 0) {
        throw ValidationError("corpus documents must not contain masked slots");
      }
      if (d.id.empty()) throw ValidationError("id: must be non-empty");
      if (ids.contains(d.id)) {
        throw ValidationError("duplicate document id '" + d.id + "' (first on line " +
                              std::to_string(ids[d.id]) + ")");
      }
      ids[d.id] = lineno;
      docs.push_back(std::move(d));
    } catch (const Error& e) {
      bad.push_back({lineno, e.what()});
    }
  }
  enforce_threshold(bad, total, source, max_invalid);
  log_info(std::string(source) + ": " + std::to_string(docs.size()) + " documents");
  return docs;
}

std::vector<Document> ingest_completion_corpus(const std::filesystem::path& path, double max_invalid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus " + path.string());
  return ingest_completion_corpus(in, path.string(), max_invalid);
}

SplitManifest load_split_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split manifest " + path.string());
  SplitManifest m;
  try {
    const auto j = json::parse(in);
    if (!j.is_object()) throw ValidationError(path.string() + ": manifest must be an object");
    for (const auto& [name, ids] : j.items()) {
      auto& list = m[canonical_split(name)];
      for (const auto& id : ids) list.push_back(id.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  for (const auto& [name, ids] : m) {
    log_info(path.string() + ": split " + name + " has " + std::to_string(ids.size()) + " ids");
  }
  return m;
}

std::vector<Document> select_split(const std::vector<Document>& docs, const SplitManifest& manifest,
                                   const std::string& split) {
  const auto it = manifest.find(canonical_split(split));
  if (it == manifest.end()) throw ValidationError("split manifest has no '" + split + "' split");
  std::unordered_map<std::string_view, const Document*> by_id;
  for (const auto& d : docs) by_id.emplace(d.id, &d);
  std::vector<Document> out;
  out.reserve(it->second.size());
  for (const auto& id : it->second) {
    const auto f = by_id.find(id);
    if (f == by_id.end()) throw ValidationError("split '" + split + "' names unknown document '" + id + "'");
    out.push_back(*f->second);
  }
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  return fields;
}

std::vector<PatPair> ingest_pat_csv(std::istream& in, std::string_view source, std::uint64_t split_seed,
                                    double max_invalid) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw ValidationError(std::string(source) + ": empty PAT file");
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto h = trim(header[i]);
    std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
    col[h] = i;
  }
  if (!col.contains("text")) throw ValidationError(std::string(source) + ": header lacks a 'text' column");
  std::vector<std::size_t> color_cols;
  for (int i = 1; i <= 5; ++i) {
    const auto it = col.find("color" + std::to_string(i));
    if (it != col.end()) color_cols.push_back(it->second);
  }
  const bool has_palette = col.contains("palette");
  if (!has_palette && color_cols.size() != 5) {
    throw ValidationError(std::string(source) + ": header needs 'palette' or 'color1'..'color5'");
  }

  std::vector<PatPair> pairs;
  std::vector<BadRecord> bad;
  std::size_t total = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++total;
    try {
      const auto f = split_csv_line(line);
      const auto field = [&](std::size_t i) -> std::string { return i < f.size() ? trim(f[i]) : std::string(); };
      PatPair p;
      p.text = field(col["text"]);
      if (p.text.empty()) throw ValidationError("empty text");
      p.id = col.contains("id") ? field(col["id"]) : std::string();
      if (p.id.empty()) p.id = "pat-" + std::to_string(lineno);
      std::vector<std::string> hexes;
      if (has_palette) {
        std::string spec = field(col["palette"]);
        std::replace_if(spec.begin(), spec.end(), [](char c) { return c == ';' || c == '|' || c == ','; }, ' ');
        std::istringstream ss(spec);
        for (std::string h; ss >> h;) hexes.push_back(h);
      } else {
        for (auto i : color_cols) {
          auto v = field(i);
          if (!v.empty()) hexes.push_back(v);
        }
      }
      p.palette = five_colors(hexes);
      if (col.contains("split")) {
        const auto s = field(col["split"]);
        if (!s.empty()) p.split = canonical_split(s);
      }
      pairs.push_back(std::move(p));
    } catch (const Error& e) {
      bad.push_back({lineno, e.what()});
    }
  }
  enforce_threshold(bad, total, source, max_invalid);
  check_unique_ids(pairs, source);
  assign_splits(pairs, split_seed, source);
  return pairs;
}

std::vector<PatPair> ingest_pat_jsonl(std::istream& in, std::string_view source, std::uint64_t split_seed,
                                      double max_invalid) {
  std::vector<PatPair> pairs;
  std::vector<BadRecord> bad;
  std::string line;
  std::size_t lineno = 0, total = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    ++total;
    try {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw ParseError(e.what());
      }
      if (!j.is_object()) throw ValidationError("record must be an object");
      PatPair p;
      p.text = trim(j.at("text").get<std::string>());
      if (p.text.empty()) throw ValidationError("empty text");
      p.id = j.contains("id") ? j["id"].get<std::string>() : "pat-" + std::to_string(lineno);
      p.palette = five_colors(j.at("palette").get<std::vector<std::string>>());
      if (j.contains("split")) p.split = canonical_split(j["split"].get<std::string>());
      pairs.push_back(std::move(p));
    } catch (const json::exception& e) {
      bad.push_back({lineno, e.what()});
    } catch (const Error& e) {
      bad.push_back({lineno, e.what()});
    }
  }
  enforce_threshold(bad, total, source, max_invalid);
  check_unique_ids(pairs, source);
  assign_splits(pairs, split_seed, source);
  return pairs;
}

std::vector<PatPair> ingest_pat(const std::filesystem::path& path, std::uint64_t split_seed, double max_invalid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open PAT file " + path.string());
  auto pairs = path.extension() == ".csv" ? ingest_pat_csv(in, path.string(), split_seed, max_invalid)
                                          : ingest_pat_jsonl(in, path.string(), split_seed, max_invalid);
  std::map<std::string, std::size_t> counts;
  for (const auto& p : pairs) ++counts[p.split];
  std::string msg = path.string() + ": " + std::to_string(pairs.size()) + " pairs";
  for (const auto& [s, n] : counts) msg += ", " + s + " " + std::to_string(n);
  log_info(msg);
  return pairs;
}

std::vector<PatPair> pat_split(const std::vector<PatPair>& pairs, const std::string& split) {
  const auto s = canonical_split(split);
  std::vector<PatPair> out;
  std::copy_if(pairs.begin(), pairs.end(), std::back_inserter(out), [&](const PatPair& p) { return p.split == s; });
  return out;
}

}  // namespace colorgpt
