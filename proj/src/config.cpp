#include "colorgpt/config.hpp"

#include <fstream>
#include <set>

#include "colorgpt/errors.hpp"

namespace colorgpt {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::set<std::string> kPromptKeys{"task", "representation", "profile", "structure", "exemplar_policy",
                                        "exemplar_count"};

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.contains(key)) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

std::filesystem::path resolve(const json& j, const char* key, const std::filesystem::path& base) {
  if (!j.contains(key) || j[key].is_null()) return {};
  std::filesystem::path p = j[key].get<std::string>();
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return (base / p).lexically_normal();
}

PromptConfig::Task parse_task(const std::string& s) {
  if (s == "completion") return PromptConfig::Task::Completion;
  if (s == "generation") return PromptConfig::Task::Generation;
  throw ValidationError("task: unknown task '" + s + "'");
}

ArmConfig arm_from(const json& j, const PromptConfig& base, const std::string& where) {
  std::set<std::string> allowed = kPromptKeys;
  allowed.insert("name");
  allowed.insert("model");
  check_keys(j, allowed, where);
  json prompt_part = json::object();
  for (const auto& [key, value] : j.items()) {
    if (kPromptKeys.contains(key)) prompt_part[key] = value;
  }
  if (prompt_part.contains("task") && parse_task(prompt_part["task"].get<std::string>()) != base.task) {
    throw ValidationError(where + ": arms cannot change the task");
  }
  ArmConfig arm;
  arm.prompt = PromptConfig::from_json(prompt_part, base);
  arm.name = j.contains("name") ? j["name"].get<std::string>() : arm_name(arm.prompt, base);
  if (j.contains("model")) arm.model = j["model"].get<std::string>();
  if (arm.model && !j.contains("name")) {
    arm.name = (arm.name == "default" ? "" : arm.name + ",") + "model=" + *arm.model;
  }
  return arm;
}

// Cartesian product over {"field": [values...]} in key order.
std::vector<json> expand_matrix(const json& m) {
  std::vector<json> combos{json::object()};
  for (const auto& [key, values] : m.items()) {
    if (!values.is_array() || values.empty()) {
      throw ValidationError("matrix." + key + ": expected a non-empty array");
    }
    std::vector<json> next;
    for (const auto& c : combos) {
      for (const auto& v : values) {
        json n = c;
        n[key] = v;
        next.push_back(std::move(n));
      }
    }
    combos = std::move(next);
  }
  return combos;
}

}  // namespace

std::string_view to_string(MockConfig::Mode m) {
  switch (m) {
    case MockConfig::Mode::Echo: return "echo";
    case MockConfig::Mode::Fixed: return "fixed";
    case MockConfig::Mode::Fixtures: return "fixtures";
  }
  return "echo";
}

std::string arm_name(const PromptConfig& arm, const PromptConfig& base) {
  const auto a = arm.to_json();
  const auto b = base.to_json();
  std::string name;
  for (const auto& [key, value] : a.items()) {
    if (value == b[key]) continue;
    if (!name.empty()) name += ",";
    name += key + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return name.empty() ? "default" : name;
}

RunConfig RunConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  check_keys(j,
             {"task", "prompt", "arms", "matrix", "llm", "mock", "embedder", "metrics", "corpus", "manifest", "pat",
              "index", "dictionary", "templates", "output_dir", "record", "replay", "split", "exemplar_split", "seed",
              "pat_split_seed", "mask_counts", "max_cases", "parallel", "rate_limit_per_minute", "repair_attempts"},
             "config");
  RunConfig c;
  try {
    if (j.contains("task")) c.task = parse_task(j["task"].get<std::string>());
    c.prompt.task = c.task;
    if (c.task == PromptConfig::Task::Generation) {
      c.prompt.representation = Representation::parse("wordhex-h");
    }
    if (j.contains("prompt")) {
      check_keys(j["prompt"], kPromptKeys, "prompt");
      c.prompt = PromptConfig::from_json(j["prompt"], c.prompt);
      if (c.prompt.task != c.task) throw ValidationError("prompt.task must match task");
    }

    std::set<std::string> names;
    const auto add_arm = [&](ArmConfig arm) {
      if (!names.insert(arm.name).second) throw ValidationError("duplicate arm name '" + arm.name + "'");
      c.arms.push_back(std::move(arm));
    };
    if (j.contains("arms")) {
      std::size_t i = 0;
      for (const auto& a : j["arms"]) add_arm(arm_from(a, c.prompt, "arms[" + std::to_string(i++) + "]"));
    }
    if (j.contains("matrix")) {
      for (const auto& combo : expand_matrix(j["matrix"])) add_arm(arm_from(combo, c.prompt, "matrix"));
    }

    if (j.contains("llm")) {
      const auto& l = j["llm"];
      check_keys(l,
                 {"provider", "model", "endpoint", "api_key_env", "temperature", "max_tokens", "timeout_s",
                  "max_attempts", "base_backoff_ms", "max_backoff_ms"},
                 "llm");
      if (l.contains("provider")) {
        const auto p = l["provider"].get<std::string>();
        if (p == "mock") c.llm.kind = LlmProviderConfig::Kind::Mock;
        else if (p == "remote_chat" || p == "remote") c.llm.kind = LlmProviderConfig::Kind::RemoteChat;
        else throw ValidationError("llm.provider: unknown provider '" + p + "'");
      }
      c.llm.model = l.value("model", c.llm.model);
      c.llm.endpoint = l.value("endpoint", c.llm.endpoint);
      if (l.contains("api_key_env")) {
        const auto var = l["api_key_env"].get<std::string>();
        if (const char* v = std::getenv(var.c_str())) c.llm.api_key = v;
      }
      c.llm.temperature = l.value("temperature", c.llm.temperature);
      c.llm.max_tokens = l.value("max_tokens", c.llm.max_tokens);
      c.llm.timeout_s = l.value("timeout_s", c.llm.timeout_s);
      c.llm.retry.max_attempts = l.value("max_attempts", c.llm.retry.max_attempts);
      c.llm.retry.base_backoff = std::chrono::milliseconds(l.value("base_backoff_ms", c.llm.retry.base_backoff.count()));
      c.llm.retry.max_backoff = std::chrono::milliseconds(l.value("max_backoff_ms", c.llm.retry.max_backoff.count()));
      c.llm.apply_env(!l.contains("model"));
    } else {
      c.llm.apply_env(true);
    }

    if (j.contains("mock")) {
      const auto& m = j["mock"];
      check_keys(m, {"mode", "fixed_color", "fixed_palette", "fixtures", "default_reply", "strict"}, "mock");
      if (m.contains("mode")) {
        const auto mode = m["mode"].get<std::string>();
        if (mode == "echo") c.mock.mode = MockConfig::Mode::Echo;
        else if (mode == "fixed") c.mock.mode = MockConfig::Mode::Fixed;
        else if (mode == "fixtures") c.mock.mode = MockConfig::Mode::Fixtures;
        else throw ValidationError("mock.mode: unknown mode '" + mode + "'");
      }
      if (m.contains("fixed_color")) c.mock.fixed_color = hex_to_color(m["fixed_color"].get<std::string>());
      if (m.contains("fixed_palette")) {
        c.mock.fixed_palette.clear();
        for (const auto& h : m["fixed_palette"]) c.mock.fixed_palette.push_back(hex_to_color(h.get<std::string>()));
        if (c.mock.fixed_palette.size() != 5) throw ValidationError("mock.fixed_palette: expected 5 colors");
      }
      c.mock.fixtures = resolve(m, "fixtures", base_dir);
      c.mock.default_reply = m.value("default_reply", c.mock.default_reply);
      c.mock.strict = m.value("strict", c.mock.strict);
    }

    if (j.contains("embedder")) {
      const auto& e = j["embedder"];
      check_keys(e, {"kind", "dimension", "url", "model", "batch_size", "parallelism", "timeout_s", "cache"},
                 "embedder");
      const auto kind = e.value("kind", std::string("hashing"));
      if (kind == "hashing") c.embedder.kind = EmbedderConfig::Kind::Hashing;
      else if (kind == "remote") c.embedder.kind = EmbedderConfig::Kind::Remote;
      else throw ValidationError("embedder.kind: unknown kind '" + kind + "'");
      c.embedder.dimension = e.value("dimension", c.embedder.dimension);
      c.embedder.remote.url = e.value("url", std::string());
      c.embedder.remote.model = e.value("model", std::string());
      c.embedder.remote.batch_size = e.value("batch_size", c.embedder.remote.batch_size);
      c.embedder.remote.parallelism = e.value("parallelism", c.embedder.remote.parallelism);
      c.embedder.remote.timeout_s = e.value("timeout_s", c.embedder.remote.timeout_s);
      c.embedder.cache = resolve(e, "cache", base_dir);
    }
    c.embedder.remote = RemoteEmbedderConfig::from_env(c.embedder.remote);

    if (j.contains("metrics")) {
      const auto& m = j["metrics"];
      check_keys(m, {"similarity", "space"}, "metrics");
      if (m.contains("similarity")) c.similarity = parse_similarity_strategy(m["similarity"].get<std::string>());
      if (m.contains("space")) c.space = parse_distance_space(m["space"].get<std::string>());
    }

    c.corpus = resolve(j, "corpus", base_dir);
    c.manifest = resolve(j, "manifest", base_dir);
    c.pat = resolve(j, "pat", base_dir);
    c.index = resolve(j, "index", base_dir);
    c.dictionary = resolve(j, "dictionary", base_dir);
    c.templates = resolve(j, "templates", base_dir);
    c.output_dir = resolve(j, "output_dir", base_dir);
    c.record = resolve(j, "record", base_dir);
    c.replay = resolve(j, "replay", base_dir);
    c.split = j.value("split", c.split);
    c.exemplar_split = j.value("exemplar_split", c.exemplar_split);
    c.seed = j.value("seed", c.seed);
    c.pat_split_seed = j.value("pat_split_seed", c.pat_split_seed);
    if (j.contains("mask_counts")) c.mask_counts = j["mask_counts"].get<std::vector<int>>();
    c.max_cases = j.value("max_cases", c.max_cases);
    c.parallel = j.value("parallel", c.parallel);
    c.rate_limit_per_minute = j.value("rate_limit_per_minute", c.rate_limit_per_minute);
    c.repair_attempts = j.value("repair_attempts", c.repair_attempts);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  } catch (const ParseError& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

std::vector<ArmConfig> RunConfig::resolved_arms() const {
  if (!arms.empty()) return arms;
  return {ArmConfig{"default", prompt, std::nullopt}};
}

void RunConfig::validate() const {
  for (const auto& arm : resolved_arms()) {
    arm.prompt.validate();
    if (arm.prompt.task != task) throw ValidationError("arm '" + arm.name + "': task mismatch");
  }
  llm.validate();
  if (parallel < 1) throw ValidationError("parallel must be >= 1");
  if (repair_attempts < 0) throw ValidationError("repair_attempts must be >= 0");
  if (rate_limit_per_minute < 0) throw ValidationError("rate_limit_per_minute must be >= 0");
  for (int k : mask_counts) {
    if (k < 1 || k > 3) throw ValidationError("mask_counts: " + std::to_string(k) + " is outside 1..3");
  }
  if (mask_counts.empty()) throw ValidationError("mask_counts must not be empty");
  const auto must_exist = [](const std::filesystem::path& p, const char* what) {
    if (!p.empty() && !std::filesystem::exists(p)) {
      throw ValidationError(std::string(what) + ": path does not exist: " + p.string());
    }
  };
  if (task == PromptConfig::Task::Completion) {
    if (corpus.empty()) throw ValidationError("completion runs need 'corpus'");
    if (manifest.empty()) throw ValidationError("completion runs need 'manifest'");
  } else if (pat.empty()) {
    throw ValidationError("generation runs need 'pat'");
  }
  must_exist(corpus, "corpus");
  must_exist(manifest, "manifest");
  must_exist(pat, "pat");
  must_exist(index, "index");
  must_exist(dictionary, "dictionary");
  must_exist(templates, "templates");
  must_exist(replay, "replay");
  if (llm.kind == LlmProviderConfig::Kind::Mock && mock.mode == MockConfig::Mode::Fixtures) {
    must_exist(mock.fixtures, "mock.fixtures");
  }
}

nlohmann::ordered_json RunConfig::to_json() const {
  ojson j;
  j["task"] = to_string(task);
  j["prompt"] = prompt.to_json();
  j["llm"] = {{"provider", llm.kind == LlmProviderConfig::Kind::Mock ? "mock" : "remote_chat"},
              {"model", llm.model},
              {"temperature", llm.temperature},
              {"max_tokens", llm.max_tokens},
              {"max_attempts", llm.retry.max_attempts}};
  if (llm.kind == LlmProviderConfig::Kind::Mock) j["llm"]["mock_mode"] = to_string(mock.mode);
  j["embedder"] = embedder.kind == EmbedderConfig::Kind::Hashing ? "hashing" : "remote:" + embedder.remote.model;
  j["split"] = split;
  j["exemplar_split"] = exemplar_split;
  j["seed"] = seed;
  if (task == PromptConfig::Task::Completion) {
    j["mask_counts"] = mask_counts;
  } else {
    j["pat_split_seed"] = pat_split_seed;
    j["similarity"] = to_string(similarity);
    j["space"] = to_string(space);
  }
  j["max_cases"] = max_cases;
  j["repair_attempts"] = repair_attempts;
  return j;
}

}  // namespace colorgpt
