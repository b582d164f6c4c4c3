#include "colorgpt/templates.hpp"

#include <fstream>
#include <sstream>

#include "builtin_templates.hpp"
#include "colorgpt/errors.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = [] {
    TemplateSet s;
    for (const auto& [name, text] : detail::kBuiltinTemplates) s.add(std::string(name), std::string(text));
    return s;
  }();
  return set;
}

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("template directory not found: " + dir.string());
  TemplateSet s;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    std::ifstream in(entry.path());
    if (!in) throw IoError("cannot read template " + entry.path().string());
    std::stringstream ss;
    ss << in.rdbuf();
    s.add(entry.path().stem().string(), ss.str());
  }
  return s;
}

void TemplateSet::add(std::string name, std::string text) { templates_[std::move(name)] = std::move(text); }

const std::string& TemplateSet::get(std::string_view name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) throw ValidationError("missing prompt template '" + std::string(name) + "'");
  return it->second;
}

std::string TemplateSet::render(std::string_view name,
                                const std::map<std::string, std::string>& vars) const {
  const std::string& text = get(name);
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("{{", pos);
    if (open == std::string::npos) {
      out.append(text, pos);
      break;
    }
    const auto close = text.find("}}", open + 2);
    if (close == std::string::npos) {
      throw ValidationError("template '" + std::string(name) + "': unterminated placeholder");
    }
    out.append(text, pos, open - pos);
    const std::string key = text.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it == vars.end()) {
      throw ValidationError("template '" + std::string(name) + "': no value for {{" + key + "}}");
    }
    out += it->second;
    pos = close + 2;
  }
  while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
  return out;
}

std::string TemplateSet::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [name, text] : templates_) {
    h = fnv1a64(name, h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = fnv1a64(text, h);
    h = fnv1a64(std::string_view("\0", 1), h);
  }
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kDigits[h & 0xf];
  return out;
}

}  // namespace colorgpt
