#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace colorgpt {

/// Named text templates with {{placeholder}} slots.
class TemplateSet {
 public:
  /// The templates/ directory compiled into the library.
  static const TemplateSet& builtin();
  /// Every *.txt file in `dir`, keyed by file stem.
  static TemplateSet load(const std::filesystem::path& dir);

  void add(std::string name, std::string text);
  bool contains(std::string_view name) const { return templates_.contains(std::string(name)); }
  const std::string& get(std::string_view name) const;

  /// Substitutes every {{key}}; unknown keys throw ValidationError.
  /// Trailing newlines of the template are dropped.
  std::string render(std::string_view name, const std::map<std::string, std::string>& vars) const;

  /// FNV-1a over (name, text) pairs in name order, as 16 hex digits.
  std::string hash() const;

 private:
  std::map<std::string, std::string, std::less<>> templates_;
};

}  // namespace colorgpt
