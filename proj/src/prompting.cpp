#include "colorgpt/prompting.hpp"

#include <array>
#include <cctype>

#include "colorgpt/errors.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

using Kind = Representation::Kind;
using json = nlohmann::json;

constexpr std::array<Color, 5> kSamplePalette{{
    {0x26, 0x46, 0x53}, {0x2a, 0x9d, 0x8f}, {0xe9, 0xc4, 0x6a}, {0xf4, 0xa2, 0x61}, {0xe7, 0x6f, 0x51}}};

std::string color_format(const Representation& r) {
  switch (r.kind) {
    case Kind::Hexcode: return "hex codes in the form \"#rrggbb\"";
    case Kind::Word: return "color words such as \"white\" or \"navy blue\"";
    case Kind::Rgb: return "RGB triplets [R, G, B] with integer channels from 0 to 255";
    case Kind::Cielab:
      return "CIELAB triplets (L*, a*, b*) with L* from 0 to 100, written as arrays [L*, a*, b*]";
    case Kind::WordHex:
      return "a color word followed by its hex code, in the form \"word (#rrggbb)\"";
  }
  return {};
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string encode_list(std::span<const Color> colors, const ColorCodec& codec) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Color c : colors) arr.push_back(codec.encode(c));
  return arr.dump();
}

std::string exemplar_blocks(const std::vector<std::pair<std::string, std::string>>& pairs,
                            const TemplateSet& templates) {
  std::vector<std::string> blocks;
  for (const auto& [in, out] : pairs) {
    blocks.push_back(templates.render("exemplar", {{"input", in}, {"output", out}}));
  }
  return join(blocks, "\n\n");
}

PromptBundle finish(std::string system, std::vector<std::string> user_parts, std::string block) {
  PromptBundle b;
  b.system = std::move(system);
  b.user = join(user_parts, "\n\n");
  b.exemplar_block = std::move(block);
  b.fingerprint = fingerprint(b.to_request());
  return b;
}

ReplyError reply_error(ReplyError::Kind kind, const std::string& what,
                       const nlohmann::ordered_json& reply) {
  return ReplyError(kind, what, reply.dump());
}

// Unwraps {"colors": [...]} / {"palette": [...]} style replies.
const nlohmann::ordered_json* single_array(const nlohmann::ordered_json& reply) {
  if (reply.is_array()) return &reply;
  if (reply.is_object() && reply.size() == 1 && reply.begin().value().is_array()) {
    return &reply.begin().value();
  }
  return nullptr;
}

}  // namespace

std::string_view to_string(PromptConfig::Task t) {
  return t == PromptConfig::Task::Completion ? "completion" : "generation";
}
std::string_view to_string(PromptConfig::Profile p) {
  return p == PromptConfig::Profile::Short ? "short" : "long";
}
std::string_view to_string(PromptConfig::Structure s) {
  return s == PromptConfig::Structure::Json ? "json" : "flat";
}
std::string_view to_string(PromptConfig::ExemplarPolicy p) {
  switch (p) {
    case PromptConfig::ExemplarPolicy::Similarity: return "similarity";
    case PromptConfig::ExemplarPolicy::Random: return "random";
    case PromptConfig::ExemplarPolicy::None: return "none";
  }
  return "none";
}

void PromptConfig::validate() const {
  if (exemplar_count < 0) throw ValidationError("prompt.exemplar_count must be >= 0");
  if (structure == Structure::Flat && task != Task::Completion) {
    throw ValidationError("prompt.structure 'flat' is only valid for the completion task");
  }
}

PromptConfig PromptConfig::from_json(const json& j, PromptConfig base) {
  try {
    if (j.contains("task")) {
      const auto v = j.at("task").get<std::string>();
      if (v == "completion") base.task = Task::Completion;
      else if (v == "generation") base.task = Task::Generation;
      else throw ValidationError("unknown task '" + v + "'");
    }
    if (j.contains("representation")) {
      base.representation = Representation::parse(j.at("representation").get<std::string>());
    }
    if (j.contains("profile")) {
      const auto v = j.at("profile").get<std::string>();
      if (v == "short") base.profile = Profile::Short;
      else if (v == "long") base.profile = Profile::Long;
      else throw ValidationError("unknown profile '" + v + "'");
    }
    if (j.contains("structure")) {
      const auto v = j.at("structure").get<std::string>();
      if (v == "json") base.structure = Structure::Json;
      else if (v == "flat") base.structure = Structure::Flat;
      else throw ValidationError("unknown structure '" + v + "'");
    }
    if (j.contains("exemplar_policy")) {
      const auto v = j.at("exemplar_policy").get<std::string>();
      if (v == "similarity") base.exemplar_policy = ExemplarPolicy::Similarity;
      else if (v == "random") base.exemplar_policy = ExemplarPolicy::Random;
      else if (v == "none") base.exemplar_policy = ExemplarPolicy::None;
      else throw ValidationError("unknown exemplar_policy '" + v + "'");
    }
    if (j.contains("exemplar_count")) base.exemplar_count = j.at("exemplar_count").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("prompt config: ") + e.what());
  } catch (const ParseError& e) {
    throw ValidationError(e.what());
  }
  base.validate();
  return base;
}

nlohmann::ordered_json PromptConfig::to_json() const {
  return {{"task", to_string(task)},
          {"representation", representation.name()},
          {"profile", to_string(profile)},
          {"structure", to_string(structure)},
          {"exemplar_policy", to_string(exemplar_policy)},
          {"exemplar_count", exemplar_count}};
}

ChatRequest PromptBundle::to_request() const {
  return {{{ChatMessage::Role::System, system}, {ChatMessage::Role::User, user}}};
}

std::string derive_query_text(const Document& d) {
  std::vector<std::string> parts;
  const auto add = [&](std::string_view raw) {
    std::string s = collapse_spaces(raw);
    if (s.empty()) return;
    const char last = s.back();
    if (last != '.' && last != '!' && last != '?') s.push_back('.');
    parts.push_back(std::move(s));
  };
  add(d.title);
  add(d.category);
  std::vector<std::string> kws;
  for (const auto& k : d.keywords) {
    auto s = collapse_spaces(k);
    if (!s.empty()) kws.push_back(std::move(s));
  }
  add(join(kws, ", "));
  for (const auto& e : d.elements) {
    if (e.text) add(*e.text);
  }
  return join(parts, " ");
}

std::string generation_payload(const std::string& text, std::span<const Color> palette) {
  nlohmann::ordered_json j;
  j["text"] = text;
  j["palette"] = nlohmann::ordered_json::array();
  for (Color c : palette) j["palette"].push_back(color_to_hex(c));
  return j.dump();
}

std::string flat_palettes(const Document& d, const ColorCodec& codec) {
  std::vector<std::string> lines;
  for (const auto& e : d.elements) {
    std::vector<std::string> slots;
    for (const auto& s : e.palette.slots) slots.push_back(s ? codec.encode_text(*s) : "_");
    lines.push_back(std::string(to_string(e.kind)) + ": [" + join(slots, ", ") + "]");
  }
  return join(lines, "\n");
}

PromptBundle build_completion_prompt(const Document& masked, std::span<const Exemplar> exemplars,
                                     const PromptConfig& cfg, const ColorCodec& codec,
                                     const TemplateSet& templates) {
  cfg.validate();
  if (cfg.task != PromptConfig::Task::Completion) {
    throw ValidationError("build_completion_prompt: config task is not completion");
  }
  const std::size_t k = masked.masked_count();
  if (k == 0) throw ValidationError("build_completion_prompt: document has no masked slot");
  const bool flat = cfg.structure == PromptConfig::Structure::Flat;

  const std::string profile = templates.render(
      cfg.profile == PromptConfig::Profile::Short ? "profile_completion_short" : "profile_completion_long", {});
  const std::string example = codec.encode(kSamplePalette[1]).dump();
  const std::string guidance =
      templates.render(flat ? "format_completion_flat" : "format_completion_json",
                       {{"color_format", color_format(codec.representation())}, {"color_example", example}});

  std::vector<std::pair<std::string, std::string>> pairs;
  if (cfg.exemplar_policy != PromptConfig::ExemplarPolicy::None) {
    const std::size_t n = std::min<std::size_t>(exemplars.size(), static_cast<std::size_t>(cfg.exemplar_count));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ex = exemplars[i];
      Document solved;
      try {
        solved = parse_document(ex.payload);
      } catch (const Error& e) {
        throw ValidationError("exemplar '" + ex.id + "' payload is not a document: " + e.what());
      }
      const std::size_t filled = solved.filled_count();
      if (filled == 0) continue;
      const int ek = static_cast<int>(std::min<std::size_t>({k, filled, 3}));
      auto [ex_masked, record] = mask_palette(solved, ek, derive_seed(0, ex.id, static_cast<std::uint64_t>(ek)));
      if (flat) {
        const auto truth = record.ground_truth();
        pairs.emplace_back(flat_palettes(ex_masked, codec), encode_list(truth, codec));
      } else {
        pairs.emplace_back(serialize_document(ex_masked, codec), serialize_document(solved, codec));
      }
    }
  }
  std::string block = exemplar_blocks(pairs, templates);

  std::vector<std::string> user{guidance};
  if (!block.empty()) user.push_back(block);
  user.push_back(templates.render(
      "input", {{"input", flat ? flat_palettes(masked, codec) : serialize_document(masked, codec)}}));
  return finish(profile, std::move(user), std::move(block));
}

PromptBundle build_generation_prompt(const std::string& text, std::span<const Exemplar> exemplars,
                                     const PromptConfig& cfg, const ColorCodec& codec,
                                     const TemplateSet& templates) {
  cfg.validate();
  if (cfg.task != PromptConfig::Task::Generation) {
    throw ValidationError("build_generation_prompt: config task is not generation");
  }
  if (collapse_spaces(text).empty()) throw ValidationError("build_generation_prompt: empty text");

  const std::string profile = templates.render(
      cfg.profile == PromptConfig::Profile::Short ? "profile_generation_short" : "profile_generation_long", {});
  const std::string guidance = templates.render(
      "format_generation", {{"color_format", color_format(codec.representation())},
                            {"palette_example", encode_list(kSamplePalette, codec)}});

  std::vector<std::pair<std::string, std::string>> pairs;
  if (cfg.exemplar_policy != PromptConfig::ExemplarPolicy::None) {
    const std::size_t n = std::min<std::size_t>(exemplars.size(), static_cast<std::size_t>(cfg.exemplar_count));
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ex = exemplars[i];
      std::vector<Color> palette;
      std::string ex_text;
      try {
        const auto j = json::parse(ex.payload);
        ex_text = j.at("text").get<std::string>();
        for (const auto& h : j.at("palette")) palette.push_back(hex_to_color(h.get<std::string>()));
      } catch (const std::exception& e) {
        throw ValidationError("exemplar '" + ex.id + "' payload is not a text/palette pair: " + e.what());
      }
      pairs.emplace_back(ex_text, encode_list(palette, codec));
    }
  }
  std::string block = exemplar_blocks(pairs, templates);

  std::vector<std::string> user{guidance};
  if (!block.empty()) user.push_back(block);
  user.push_back(templates.render("input", {{"input", text}}));
  return finish(profile, std::move(user), std::move(block));
}

std::string repair_instruction(const std::string& error, const TemplateSet& templates) {
  return templates.render("repair", {{"error", error}});
}

std::vector<Color> parse_completion_reply(const nlohmann::ordered_json& reply,
                                          std::span<const SlotRef> targets, const ColorCodec& codec,
                                          PromptConfig::Structure structure) {
  using RK = ReplyError::Kind;
  std::vector<Color> out;
  out.reserve(targets.size());

  if (structure == PromptConfig::Structure::Flat) {
    const auto* arr = single_array(reply);
    if (!arr) throw reply_error(RK::Structure, "expected a JSON array of colors", reply);
    if (arr->size() != targets.size()) {
      throw reply_error(RK::Count,
                        "expected " + std::to_string(targets.size()) + " colors, got " +
                            std::to_string(arr->size()),
                        reply);
    }
    for (const auto& v : *arr) out.push_back(codec.decode(v));
    return out;
  }

  const nlohmann::ordered_json* doc = &reply;
  if (doc->is_object() && !doc->contains("elements") && doc->size() == 1 &&
      doc->begin().value().is_object()) {
    doc = &doc->begin().value();
  }
  if (!doc->is_object() || !doc->contains("elements") || !(*doc)["elements"].is_array()) {
    throw reply_error(RK::Structure, "reply is not a document with an elements array", reply);
  }
  const auto& elements = (*doc)["elements"];
  for (const auto& t : targets) {
    const nlohmann::ordered_json* element = nullptr;
    for (const auto& e : elements) {
      if (e.is_object() && e.contains("id") && e["id"].is_string() &&
          e["id"].get_ref<const std::string&>() == t.element_id) {
        element = &e;
        break;
      }
    }
    if (!element) throw reply_error(RK::Structure, "reply lacks element '" + t.element_id + "'", reply);
    const auto it = element->find("palette");
    if (it == element->end() || !it->is_array()) {
      throw reply_error(RK::Structure, "element '" + t.element_id + "' has no palette array", reply);
    }
    if (t.slot >= it->size()) {
      throw reply_error(RK::Structure,
                        "element '" + t.element_id + "' palette has no slot " + std::to_string(t.slot),
                        reply);
    }
    try {
      out.push_back(codec.decode((*it)[t.slot]));
    } catch (const ReplyError& e) {
      throw ReplyError(RK::Format, "element '" + t.element_id + "' slot " + std::to_string(t.slot) + ": " + e.what(),
                       reply.dump());
    }
  }
  return out;
}

Palette parse_generation_reply(const nlohmann::ordered_json& reply, const ColorCodec& codec) {
  const auto* arr = single_array(reply);
  if (!arr) throw reply_error(ReplyError::Kind::Structure, "expected a JSON array of 5 colors", reply);
  if (arr->size() != 5) {
    throw reply_error(ReplyError::Kind::Count,
                      "expected 5 colors, got " + std::to_string(arr->size()), reply);
  }
  Palette p;
  for (const auto& v : *arr) p.slots.emplace_back(codec.decode(v));
  return p;
}

}  // namespace colorgpt
