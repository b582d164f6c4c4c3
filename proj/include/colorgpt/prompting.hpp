#pragma once

#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "colorgpt/codec.hpp"
#include "colorgpt/document.hpp"
#include "colorgpt/llm.hpp"
#include "colorgpt/retrieval.hpp"
#include "colorgpt/templates.hpp"

namespace colorgpt {

/// Every ablation arm is a PromptConfig value.
struct PromptConfig {
  enum class Task { Completion, Generation };
  enum class Profile { Short, Long };
  enum class Structure { Json, Flat };
  enum class ExemplarPolicy { Similarity, Random, None };

  Task task = Task::Completion;
  Representation representation{};
  Profile profile = Profile::Short;
  Structure structure = Structure::Json;
  ExemplarPolicy exemplar_policy = ExemplarPolicy::Similarity;
  int exemplar_count = 1;

  /// Flat structure is only valid for completion; exemplar_count >= 0.
  void validate() const;

  /// Reads the keys representation/profile/structure/exemplar_policy/
  /// exemplar_count from `j` on top of `base`.
  static PromptConfig from_json(const nlohmann::json& j, PromptConfig base);
  nlohmann::ordered_json to_json() const;

  friend bool operator==(const PromptConfig&, const PromptConfig&) = default;
};

std::string_view to_string(PromptConfig::Task);
std::string_view to_string(PromptConfig::Profile);
std::string_view to_string(PromptConfig::Structure);
std::string_view to_string(PromptConfig::ExemplarPolicy);

struct PromptBundle {
  std::string system;
  std::string user;
  std::string exemplar_block;  // also embedded in `user`; empty when no exemplar
  std::string fingerprint;     // of to_request()

  ChatRequest to_request() const;
};

/// "title. category. kw1, kw2. text1. text2." with empty parts dropped and
/// whitespace collapsed.
std::string derive_query_text(const Document& d);

/// Canonical exemplar payload for generation: {"text": ..., "palette": [hex x5]}.
std::string generation_payload(const std::string& text, std::span<const Color> palette);

/// Bracketed palette lists, one line per element: "svg: [#aa0000, _, #0000ff]".
std::string flat_palettes(const Document& d, const ColorCodec& codec);

/// Profile + output-format guidance + exemplar blocks + masked document.
/// Throws ValidationError if `masked` has no masked slot.
PromptBundle build_completion_prompt(const Document& masked, std::span<const Exemplar> exemplars,
                                     const PromptConfig& cfg, const ColorCodec& codec,
                                     const TemplateSet& templates = TemplateSet::builtin());

/// Asks for exactly five colors in cfg.representation as a JSON array.
PromptBundle build_generation_prompt(const std::string& text, std::span<const Exemplar> exemplars,
                                     const PromptConfig& cfg, const ColorCodec& codec,
                                     const TemplateSet& templates = TemplateSet::builtin());

/// Follow-up user message asking the model to fix an unusable reply.
std::string repair_instruction(const std::string& error,
                               const TemplateSet& templates = TemplateSet::builtin());

/// Colors for `targets`, in order. JSON structure: the reply is the full
/// document and each target is looked up by element id and slot. Flat
/// structure: the reply is an array of exactly targets.size() colors.
/// Throws ReplyError (Structure / Format / Count).
std::vector<Color> parse_completion_reply(const nlohmann::ordered_json& reply,
                                          std::span<const SlotRef> targets,
                                          const ColorCodec& codec,
                                          PromptConfig::Structure structure = PromptConfig::Structure::Json);

/// Exactly five decoded colors as a filled palette. Throws ReplyError.
Palette parse_generation_reply(const nlohmann::ordered_json& reply, const ColorCodec& codec);

}  // namespace colorgpt
