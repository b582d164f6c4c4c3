#include "colorgpt/pipeline.hpp"

#include <algorithm>
#include <set>

#include "colorgpt/errors.hpp"
#include "colorgpt/log.hpp"
#include "colorgpt/rng.hpp"

namespace colorgpt {
namespace {

using Kind = Representation::Kind;

bool needs_dictionary(const Representation& r) { return r.kind == Kind::Word || r.kind == Kind::WordHex; }

ColorCodec make_codec(const PipelineContext& ctx, const PromptConfig& cfg) {
  if (needs_dictionary(cfg.representation) && (!ctx.dictionary || ctx.dictionary->empty())) {
    throw ValidationError("representation '" + cfg.representation.name() + "' needs a color dictionary");
  }
  if (cfg.representation.kind == Kind::Word || cfg.representation.mode == Representation::Mode::W) {
    if (needs_dictionary(cfg.representation) && !ctx.embedder) {
      throw ValidationError("representation '" + cfg.representation.name() + "' needs an embedder");
    }
  }
  return ColorCodec(cfg.representation, ctx.dictionary, ctx.embedder);
}

// Sends `request`, repairing unusable replies up to ctx.repair_attempts times.
template <typename Parse>
Outcome<std::vector<Color>> exchange(const PipelineContext& ctx, ChatRequest request,
                                     const std::string* oracle_reply, Parse parse) {
  Outcome<std::vector<Color>> out;
  for (int attempt = 0;; ++attempt) {
    if (ctx.oracle && oracle_reply) ctx.oracle->set_oracle(fingerprint(request), *oracle_reply);
    ChatResponse response;
    try {
      ++out.requests;
      response = complete_chat(*ctx.provider, request, ctx.limiter);
    } catch (const ConfigError&) {
      throw;
    } catch (const ProviderError& e) {
      out.status = CaseStatus::ProviderFailure;
      out.error = e.what();
      return out;
    }
    try {
      auto extracted = extract_json(response.content);
      if (!extracted.ok()) throw ReplyError(ReplyError::Kind::Extraction, extracted.error, extracted.raw);
      out.value = parse(*extracted.value);
      out.status = CaseStatus::Ok;
      return out;
    } catch (const ReplyError& e) {
      log_debug(std::string("unusable reply: ") + e.what());
      if (attempt >= ctx.repair_attempts) {
        out.status = CaseStatus::ParseFailure;
        out.error = e.what();
        return out;
      }
      request.messages.push_back({ChatMessage::Role::Assistant, response.content});
      request.messages.push_back({ChatMessage::Role::User, repair_instruction(e.what(), ctx.template_set())});
    }
  }
}

std::string encoded_array(const ColorCodec& codec, std::span<const Color> colors) {
  nlohmann::ordered_json a = nlohmann::ordered_json::array();
  for (Color c : colors) a.push_back(codec.encode(c));
  return a.dump();
}

}  // namespace

const TemplateSet& PipelineContext::template_set() const {
  return templates ? *templates : TemplateSet::builtin();
}

std::vector<Exemplar> select_exemplars(const PipelineContext& ctx, const PromptConfig& cfg,
                                       const std::string& query_text, const std::string& exclude_id,
                                       const std::string& case_key) {
  std::vector<Exemplar> out;
  if (cfg.exemplar_policy == PromptConfig::ExemplarPolicy::None || cfg.exemplar_count <= 0 || !ctx.index ||
      ctx.index->empty()) {
    return out;
  }
  const auto want = static_cast<std::size_t>(cfg.exemplar_count);
  if (cfg.exemplar_policy == PromptConfig::ExemplarPolicy::Similarity) {
    if (!ctx.embedder) throw ValidationError("similarity exemplars need an embedder");
    for (const auto& hit : ctx.index->query_top_k(*ctx.embedder, query_text, want + 1)) {
      if (hit.exemplar->id == exclude_id) continue;
      if (out.size() == want) break;
      out.push_back(*hit.exemplar);
    }
    return out;
  }
  std::set<std::string> taken;
  const std::size_t available = ctx.index->size() - (ctx.index->find(exclude_id) ? 1 : 0);
  for (std::uint64_t draw = 0; out.size() < std::min(want, available); ++draw) {
    const auto& e = ctx.index->sample_random(derive_seed(ctx.seed, case_key, draw));
    if (e.id == exclude_id || !taken.insert(e.id).second) continue;
    out.push_back(e);
  }
  return out;
}

Outcome<std::vector<Color>> complete_document(const PipelineContext& ctx, const Document& masked,
                                              const PromptConfig& cfg, const std::string& case_key,
                                              std::span<const Color> truth) {
  const auto targets = masked_slots(masked);
  if (targets.empty()) throw ValidationError("document '" + masked.id + "' has no masked slot");
  const ColorCodec codec = make_codec(ctx, cfg);
  const auto exemplars = select_exemplars(ctx, cfg, derive_query_text(masked), masked.id, case_key);
  PromptBundle bundle = build_completion_prompt(masked, exemplars, cfg, codec, ctx.template_set());

  std::optional<std::string> oracle_reply;
  if (ctx.oracle && ctx.mock.mode != MockConfig::Mode::Fixtures) {
    std::vector<Color> answer;
    if (ctx.mock.mode == MockConfig::Mode::Echo) {
      if (truth.size() != targets.size()) throw ValidationError("echo mock needs the ground truth of every slot");
      answer.assign(truth.begin(), truth.end());
    } else {
      answer.assign(targets.size(), ctx.mock.fixed_color);
    }
    oracle_reply = cfg.structure == PromptConfig::Structure::Flat
                       ? encoded_array(codec, answer)
                       : serialize_document(apply_colors(masked, targets, answer), codec);
  }

  auto out = exchange(ctx, bundle.to_request(), oracle_reply ? &*oracle_reply : nullptr,
                      [&](const nlohmann::ordered_json& reply) {
                        return parse_completion_reply(reply, targets, codec, cfg.structure);
                      });
  out.exemplar_id = exemplars.empty() ? std::string() : exemplars.front().id;
  out.prompt = std::move(bundle);
  return out;
}

Outcome<std::vector<Color>> generate_palette(const PipelineContext& ctx, const std::string& text,
                                             const PromptConfig& cfg, const std::string& case_key,
                                             const std::string& exclude_id, std::span<const Color> truth) {
  const ColorCodec codec = make_codec(ctx, cfg);
  const auto exemplars = select_exemplars(ctx, cfg, text, exclude_id, case_key);
  PromptBundle bundle = build_generation_prompt(text, exemplars, cfg, codec, ctx.template_set());

  std::optional<std::string> oracle_reply;
  if (ctx.oracle && ctx.mock.mode != MockConfig::Mode::Fixtures) {
    if (ctx.mock.mode == MockConfig::Mode::Echo) {
      if (truth.size() != 5) throw ValidationError("echo mock needs a 5-color ground truth");
      oracle_reply = encoded_array(codec, truth);
    } else {
      oracle_reply = encoded_array(codec, ctx.mock.fixed_palette);
    }
  }

  auto out = exchange(ctx, bundle.to_request(), oracle_reply ? &*oracle_reply : nullptr,
                      [&](const nlohmann::ordered_json& reply) { return parse_generation_reply(reply, codec).colors(); });
  out.exemplar_id = exemplars.empty() ? std::string() : exemplars.front().id;
  out.prompt = std::move(bundle);
  return out;
}

PipelineResources::PipelineResources(const RunConfig& cfg, bool need_dictionary) : cfg_(cfg) {
  std::filesystem::path dict_path = cfg.dictionary;
  if (dict_path.empty() && std::filesystem::exists(kDefaultDictionaryPath)) dict_path = kDefaultDictionaryPath;
  if (!dict_path.empty()) {
    dictionary_ = load_dictionary(dict_path);
  } else if (need_dictionary) {
    throw ValidationError("a color dictionary is required (--color-dict or 'dictionary'); " +
                          std::string(kDefaultDictionaryPath) + " not found");
  }

  if (cfg.embedder.kind == EmbedderConfig::Kind::Hashing) {
    embedder_ = std::make_shared<HashingEmbedder>(cfg.embedder.dimension);
  } else {
    auto remote = std::make_shared<RemoteEmbedder>(cfg.embedder.remote);
    embedder_ = std::make_shared<CachingEmbedder>(remote, cfg.embedder.cache);
  }

  templates_ = std::make_unique<TemplateSet>(cfg.templates.empty() ? TemplateSet::builtin()
                                                                    : TemplateSet::load(cfg.templates));

  if (cfg.llm.kind == LlmProviderConfig::Kind::Mock && cfg.replay.empty()) {
    auto fixtures = cfg.mock.mode == MockConfig::Mode::Fixtures && !cfg.mock.fixtures.empty()
                        ? MockProvider::load_fixtures(cfg.mock.fixtures)
                        : std::unordered_map<std::string, std::string>{};
    mock_ = std::make_shared<MockProvider>(std::move(fixtures),
                                           cfg.mock.strict ? MockProvider::Mode::Strict
                                                           : MockProvider::Mode::DefaultReply,
                                           cfg.mock.default_reply);
  }
  limiter_ = std::make_unique<RateLimiter>(cfg.rate_limit_per_minute);
}

std::shared_ptr<ChatProvider> PipelineResources::provider_for(const std::optional<std::string>& model) {
  const std::string key = model.value_or("");
  auto it = providers_.find(key);
  if (it != providers_.end()) return it->second;
  LlmProviderConfig llm = cfg_.llm;
  if (model) llm.model = *model;
  auto p = make_provider(llm, mock_, cfg_.record, cfg_.replay);
  providers_.emplace(key, p);
  return p;
}

PipelineContext PipelineResources::context(const ExemplarIndex* index, const std::optional<std::string>& model) {
  PipelineContext ctx;
  ctx.provider = provider_for(model);
  if (mock_ && cfg_.mock.mode != MockConfig::Mode::Fixtures) ctx.oracle = mock_;
  ctx.mock = cfg_.mock;
  ctx.dictionary = &dictionary_;
  ctx.embedder = embedder_.get();
  ctx.index = index;
  ctx.templates = templates_.get();
  ctx.limiter = limiter_.get();
  ctx.repair_attempts = cfg_.repair_attempts;
  ctx.seed = cfg_.seed;
  return ctx;
}

}  // namespace colorgpt
