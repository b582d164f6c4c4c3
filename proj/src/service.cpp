#include "colorgpt/service.hpp"

#include <httplib.h>

#include <chrono>
#include <fstream>

#include "colorgpt/bench.hpp"
#include "colorgpt/errors.hpp"
#include "colorgpt/ingest.hpp"
#include "colorgpt/log.hpp"

namespace colorgpt {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

HttpReply error_reply(int status, const std::string& message) {
  return {status, ojson{{"error", message}}.dump()};
}

json parse_body(std::string_view body) {
  try {
    auto j = json::parse(body);
    if (!j.is_object()) throw ValidationError("request body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("request body is not JSON: ") + e.what());
  }
}

PromptConfig with_overrides(const json& body, const PromptConfig& base) {
  if (!body.contains("overrides")) return base;
  const auto& o = body["overrides"];
  if (!o.is_object()) throw ValidationError("overrides must be an object");
  for (const auto& [key, value] : o.items()) {
    if (key == "task") throw ValidationError("overrides cannot change the task");
    if (key != "representation" && key != "profile" && key != "structure" && key != "exemplar_policy" &&
        key != "exemplar_count") {
      throw ValidationError("overrides: unknown key '" + key + "'");
    }
  }
  return PromptConfig::from_json(o, base);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

ExemplarIndex load_or_build(const std::filesystem::path& prebuilt, const EmbeddingProvider& embedder,
                            const std::function<std::vector<CorpusItem>()>& corpus) {
  if (!prebuilt.empty()) {
    auto index = ExemplarIndex::load(prebuilt);
    if (index.provider_name() != embedder.name()) {
      throw ConfigError("index " + prebuilt.string() + " was built with '" + index.provider_name() +
                        "', the service embedder is '" + embedder.name() + "'");
    }
    return index;
  }
  const auto items = corpus();
  return items.empty() ? ExemplarIndex{} : build_index(items, embedder);
}

}  // namespace

ServiceConfig ServiceConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
  json run = j;
  ServiceConfig c;
  json gen_prompt;
  if (run.contains("service")) {
    const auto s = run["service"];
    run.erase("service");
    for (const auto& [key, value] : s.items()) {
      if (key != "host" && key != "port" && key != "max_body_bytes" && key != "cors_origin" &&
          key != "completion_index" && key != "generation_index" && key != "generation_prompt") {
        throw ValidationError("service: unknown key '" + key + "'");
      }
    }
    try {
      c.host = s.value("host", c.host);
      c.port = s.value("port", c.port);
      c.max_body_bytes = s.value("max_body_bytes", c.max_body_bytes);
      c.cors_origin = s.value("cors_origin", c.cors_origin);
      const auto path = [&](const char* key) -> std::filesystem::path {
        if (!s.contains(key)) return {};
        std::filesystem::path p = s[key].get<std::string>();
        return p.is_relative() && !base_dir.empty() ? (base_dir / p).lexically_normal() : p;
      };
      c.completion_index = path("completion_index");
      c.generation_index = path("generation_index");
      if (s.contains("generation_prompt")) gen_prompt = s["generation_prompt"];
    } catch (const json::exception& e) {
      throw ValidationError(std::string("service: ") + e.what());
    }
  }
  run["task"] = "completion";
  if (!run.contains("mock")) run["mock"] = json::object();
  if (!run["mock"].contains("mode")) run["mock"]["mode"] = "fixed";
  c.run = RunConfig::from_json(run, base_dir);
  if (!gen_prompt.is_null()) {
    PromptConfig base;
    base.task = PromptConfig::Task::Generation;
    base.representation = Representation::parse("wordhex-h");
    c.run.arms.push_back({"generation", PromptConfig::from_json(gen_prompt, base), std::nullopt});
  }
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
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

RecService::RecService(ServiceConfig cfg) : cfg_(std::move(cfg)) {
  const RunConfig& run = cfg_.run;
  if (run.llm.kind == LlmProviderConfig::Kind::Mock && run.mock.mode == MockConfig::Mode::Echo) {
    throw ConfigError("the service has no ground truth; use mock mode 'fixed' or 'fixtures'");
  }
  run.llm.validate();
  resources_ = std::make_unique<PipelineResources>(run, false);

  completion_index_ = load_or_build(cfg_.completion_index, resources_->embedder(), [&] {
    if (run.corpus.empty()) return std::vector<CorpusItem>{};
    const auto docs = ingest_completion_corpus(run.corpus);
    if (run.manifest.empty()) return completion_corpus(docs);
    return completion_corpus(select_split(docs, load_split_manifest(run.manifest), run.exemplar_split));
  });
  generation_index_ = load_or_build(cfg_.generation_index, resources_->embedder(), [&] {
    if (run.pat.empty()) return std::vector<CorpusItem>{};
    return generation_corpus(pat_split(ingest_pat(run.pat, run.pat_split_seed), run.exemplar_split));
  });
  completion_ctx_ = resources_->context(&completion_index_);
  generation_ctx_ = resources_->context(&generation_index_);
  log_info("service ready: " + std::to_string(completion_index_.size()) + " completion and " +
           std::to_string(generation_index_.size()) + " generation exemplars");
}

RecService::~RecService() { stop(); }

HttpReply RecService::complete(std::string_view body) const {
  const auto t0 = std::chrono::steady_clock::now();
  Document doc;
  PromptConfig cfg;
  try {
    const auto j = parse_body(body);
    if (!j.contains("document")) throw ValidationError("missing 'document'");
    const auto& d = j["document"];
    doc = d.is_string() ? parse_document(d.get<std::string>()) : document_from_json(ojson(d));
    if (doc.masked_count() == 0) throw ValidationError("document has no [MASK] slot");
    cfg = with_overrides(j, cfg_.run.prompt);
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  try {
    const auto out = complete_document(completion_ctx_, doc, cfg, doc.id);
    if (out.status == CaseStatus::ParseFailure) return error_reply(422, out.error);
    if (out.status == CaseStatus::ProviderFailure) return error_reply(502, out.error);
    const auto targets = masked_slots(doc);
    ojson res;
    res["colors"] = ojson::array();
    for (Color c : *out.value) res["colors"].push_back(color_to_hex(c));
    res["updated_document"] = document_to_json(apply_colors(doc, targets, *out.value));
    res["exemplar_id"] = out.exemplar_id.empty() ? ojson(nullptr) : ojson(out.exemplar_id);
    res["timing"] = {{"total_ms", elapsed_ms(t0)}, {"requests", out.requests}};
    return {200, res.dump()};
  } catch (const ProviderError& e) {
    return error_reply(502, e.what());
  } catch (const ValidationError& e) {
    return error_reply(400, e.what());
  }
}

HttpReply RecService::generate(std::string_view body) const {
  const auto t0 = std::chrono::steady_clock::now();
  std::string text;
  PromptConfig cfg;
  try {
    const auto j = parse_body(body);
    if (!j.contains("text") || !j["text"].is_string()) throw ValidationError("missing 'text'");
    text = j["text"].get<std::string>();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ValidationError("text is empty");
    PromptConfig base;
    base.task = PromptConfig::Task::Generation;
    base.representation = Representation::parse("wordhex-h");
    for (const auto& a : cfg_.run.arms) {
      if (a.prompt.task == PromptConfig::Task::Generation) base = a.prompt;
    }
    cfg = with_overrides(j, base);
  } catch (const Error& e) {
    return error_reply(400, e.what());
  }
  try {
    const auto out = generate_palette(generation_ctx_, text, cfg, text);
    if (out.status == CaseStatus::ParseFailure) return error_reply(422, out.error);
    if (out.status == CaseStatus::ProviderFailure) return error_reply(502, out.error);
    ojson res;
    res["palette"] = ojson::array();
    for (Color c : *out.value) res["palette"].push_back(color_to_hex(c));
    res["exemplar_id"] = out.exemplar_id.empty() ? ojson(nullptr) : ojson(out.exemplar_id);
    res["timing"] = {{"total_ms", elapsed_ms(t0)}, {"requests", out.requests}};
    return {200, res.dump()};
  } catch (const ProviderError& e) {
    return error_reply(502, e.what());
  } catch (const ValidationError& e) {
    return error_reply(400, e.what());
  }
}

HttpReply RecService::health() const {
  ojson res{{"status", "ok"},
            {"model", cfg_.run.llm.model},
            {"index_size", completion_index_.size() + generation_index_.size()},
            {"dict_size", resources_->dictionary().size()}};
  return {200, res.dump()};
}

int RecService::start() {
  if (server_) throw ValidationError("service already started");
  server_ = std::make_unique<httplib::Server>();
  auto& s = *server_;
  s.set_payload_max_length(cfg_.max_body_bytes);
  s.set_default_headers({{"Access-Control-Allow-Origin", cfg_.cors_origin},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                         {"Access-Control-Allow-Headers", "Content-Type"}});
  const auto send = [](httplib::Response& res, const HttpReply& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  s.Post("/v1/complete", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, complete(req.body));
  });
  s.Post("/v1/generate", [this, send](const httplib::Request& req, httplib::Response& res) {
    send(res, generate(req.body));
  });
  s.Get("/v1/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
  s.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  const int port = cfg_.port == 0 ? s.bind_to_any_port(cfg_.host) : (s.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1);
  if (port < 0) {
    server_.reset();
    throw IoError("cannot bind " + cfg_.host + ":" + std::to_string(cfg_.port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  log_info("listening on " + cfg_.host + ":" + std::to_string(port));
  return port;
}

void RecService::wait() {
  if (thread_.joinable()) thread_.join();
}

void RecService::stop() {
  if (server_) server_->stop();
  wait();
}

}  // namespace colorgpt
