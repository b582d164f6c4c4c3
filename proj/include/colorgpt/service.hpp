#pragma once

#include <filesystem>
#include <json.hpp>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

#include "colorgpt/config.hpp"
#include "colorgpt/pipeline.hpp"
#include "colorgpt/retrieval.hpp"

namespace httplib {
class Server;
}

namespace colorgpt {

/// RunConfig plus the HTTP settings read from its "service" object:
/// {"host", "port", "max_body_bytes", "cors_origin", "completion_index",
/// "generation_index"}. Without prebuilt indexes, the completion index is
/// built from `corpus` (the exemplar split when a manifest is given) and
/// the generation index from `pat`.
struct ServiceConfig {
  RunConfig run;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t max_body_bytes = 1 << 20;
  std::string cors_origin = "*";
  std::filesystem::path completion_index;
  std::filesystem::path generation_index;

  static ServiceConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static ServiceConfig load(const std::filesystem::path& path);
};

struct HttpReply {
  int status = 200;
  std::string body;  // JSON
};

/// Stateless completion / generation endpoints over shared read-only
/// resources. Colors travel as "#rrggbb" on the wire whatever the prompt
/// representation.
class RecService {
 public:
  /// Loads the dictionary and indexes; throws on any startup failure.
  explicit RecService(ServiceConfig cfg);
  ~RecService();

  RecService(const RecService&) = delete;
  RecService& operator=(const RecService&) = delete;

  /// POST /v1/complete: {document, overrides?} -> {colors, updated_document, exemplar_id, timing}
  HttpReply complete(std::string_view body) const;
  /// POST /v1/generate: {text, overrides?} -> {palette, exemplar_id, timing}
  HttpReply generate(std::string_view body) const;
  /// GET /v1/health: {status, model, index_size, dict_size}
  HttpReply health() const;

  /// Binds (port 0 picks a free port) and serves on a background thread.
  /// Returns the bound port.
  int start();
  /// Blocks until stop() is called.
  void wait();
  void stop();

 private:
  ServiceConfig cfg_;
  std::unique_ptr<PipelineResources> resources_;
  ExemplarIndex completion_index_;
  ExemplarIndex generation_index_;
  PipelineContext completion_ctx_;
  PipelineContext generation_ctx_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace colorgpt
