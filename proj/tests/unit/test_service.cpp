#include <colorgpt/errors.hpp>
#include <colorgpt/ingest.hpp>
#include <colorgpt/service.hpp>
#include <gtest/gtest.h>
#include <httplib.h>

#include <cstdlib>

#include "test_support.hpp"

using namespace colorgpt;
using nlohmann::json;
using colorgpt::testing::fixture;

namespace {

ServiceConfig service_config(const json& patch = json::object()) {
  auto j = colorgpt::testing::read_json(fixture("service.json"));
  j.merge_patch(patch);
  return ServiceConfig::from_json(j, fixture("service.json").parent_path());
}

std::string masked_document(int k = 2) {
  const auto docs = ingest_completion_corpus(fixture("corpus.jsonl"));
  return serialize_document(mask_palette(docs[12], k, 5).first);
}

json complete_body(int k = 2) { return json{{"document", json::parse(masked_document(k))}}; }

const RecService& shared_service() {
  static const RecService service(service_config());
  return service;
}

}  // namespace

TEST(ServiceConfig, ParsesServiceSection) {
  const auto c = service_config(json{{"service", {{"port", 9090}, {"cors_origin", "https://example.org"}}}});
  EXPECT_EQ(c.port, 9090);
  EXPECT_EQ(c.cors_origin, "https://example.org");
  EXPECT_EQ(c.run.mock.mode, MockConfig::Mode::Fixed);
  EXPECT_THROW(service_config(json{{"service", {{"threads", 4}}}}), ValidationError);
  EXPECT_THROW(RecService(service_config(json{{"mock", {{"mode", "echo"}}}})), ConfigError);
}

TEST(ServiceHandlers, Health) {
  const auto r = shared_service().health();
  EXPECT_EQ(r.status, 200);
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["dict_size"], 949);
  // 8 train documents plus 5 train PAT pairs.
  EXPECT_EQ(j["index_size"], 13);
}

TEST(ServiceHandlers, CompleteFillsEveryMask) {
  const auto r = shared_service().complete(complete_body(2).dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["colors"], json({"#123456", "#123456"}));
  EXPECT_TRUE(j["exemplar_id"].is_string());
  EXPECT_EQ(j["timing"]["requests"], 1);
  const auto updated = parse_document(j["updated_document"].dump());
  EXPECT_EQ(updated.masked_count(), 0u);
  // The document may also arrive as a JSON string.
  const auto s = shared_service().complete(json{{"document", masked_document(1)}}.dump());
  EXPECT_EQ(s.status, 200) << s.body;
}

TEST(ServiceHandlers, CompleteWithOverrides) {
  auto body = complete_body(1);
  body["overrides"] = {{"representation", "cielab"}, {"exemplar_policy", "none"}};
  const auto r = shared_service().complete(body.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_TRUE(j["exemplar_id"].is_null());
  // Colors are hex on the wire whatever the prompt representation.
  EXPECT_EQ(j["colors"][0].get<std::string>().size(), 7u);
  body["overrides"] = {{"task", "generation"}};
  EXPECT_EQ(shared_service().complete(body.dump()).status, 400);
  body["overrides"] = {{"temperature", 1}};
  EXPECT_EQ(shared_service().complete(body.dump()).status, 400);
}

TEST(ServiceHandlers, BadRequests) {
  const auto& s = shared_service();
  EXPECT_EQ(s.complete("not json").status, 400);
  EXPECT_EQ(s.complete("[1]").status, 400);
  EXPECT_EQ(s.complete("{}").status, 400);
  const auto docs = ingest_completion_corpus(fixture("corpus.jsonl"));
  const auto unmasked = s.complete(json{{"document", serialize_document(docs[0])}}.dump());
  EXPECT_EQ(unmasked.status, 400);
  EXPECT_NE(json::parse(unmasked.body)["error"].get<std::string>().find("[MASK]"), std::string::npos);
  EXPECT_EQ(s.generate("{}").status, 400);
  EXPECT_EQ(s.generate(R"({"text": "  "})").status, 400);
}

TEST(ServiceHandlers, Generate) {
  const auto r = shared_service().generate(R"({"text": "deep sea blue"})");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["palette"], json({"#202020", "#505050", "#808080", "#b0b0b0", "#e0e0e0"}));
  EXPECT_TRUE(j["exemplar_id"].is_string());
}

TEST(ServiceHandlers, UnusableReplyIs422) {
  const RecService service(service_config(
      json{{"mock", {{"mode", "fixtures"}, {"strict", false}, {"default_reply", "I cannot help with that."}}}}));
  const auto r = service.complete(complete_body(1).dump());
  EXPECT_EQ(r.status, 422) << r.body;
  EXPECT_EQ(service.generate(R"({"text": "sky"})").status, 422);
}

TEST(ServiceHandlers, ProviderDownIs502ButHealthy) {
  ::setenv("COLORGPT_TEST_KEY", "k", 1);
  const RecService service(service_config(json{{"llm",
                                                {{"provider", "remote_chat"},
                                                 {"endpoint", "http://127.0.0.1:9/v1/chat/completions"},
                                                 {"api_key_env", "COLORGPT_TEST_KEY"},
                                                 {"max_attempts", 2},
                                                 {"base_backoff_ms", 1},
                                                 {"timeout_s", 0.5}}},
                                               {"mock", nullptr}}));
  EXPECT_EQ(service.health().status, 200);
  const auto r = service.complete(complete_body(1).dump());
  EXPECT_EQ(r.status, 502) << r.body;
  EXPECT_EQ(service.generate(R"({"text": "sky"})").status, 502);
}

TEST(ServiceHttp, EndToEnd) {
  RecService service(service_config(json{{"service", {{"max_body_bytes", 64 * 1024}}}}));
  const int port = service.start();
  ASSERT_GT(port, 0);
  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);

  auto health = client.Get("/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(health->get_header_value("Access-Control-Allow-Origin"), "*");

  auto done = client.Post("/v1/complete", complete_body(3).dump(), "application/json");
  ASSERT_TRUE(done);
  EXPECT_EQ(done->status, 200) << done->body;
  EXPECT_EQ(json::parse(done->body)["colors"].size(), 3u);

  auto gen = client.Post("/v1/generate", R"({"text": "calm ocean at dawn"})", "application/json");
  ASSERT_TRUE(gen);
  EXPECT_EQ(gen->status, 200);

  auto bad = client.Post("/v1/complete", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_TRUE(json::parse(bad->body).contains("error"));

  auto preflight = client.Options("/v1/complete");
  ASSERT_TRUE(preflight);
  EXPECT_EQ(preflight->status, 204);
  EXPECT_EQ(preflight->get_header_value("Access-Control-Allow-Methods"), "GET, POST, OPTIONS");

  auto huge = client.Post("/v1/complete", std::string(128 * 1024, ' '), "application/json");
  ASSERT_TRUE(huge);
  EXPECT_EQ(huge->status, 413);

  EXPECT_THROW(service.start(), ValidationError);
  service.stop();
}

TEST(ServiceHttp, ConcurrentRequests) {
  RecService service(service_config());
  const int port = service.start();
  const auto body = complete_body(2).dump();
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&] {
      httplib::Client client("127.0.0.1", port);
      for (int i = 0; i < 5; ++i) {
        auto r = client.Post("/v1/complete", body, "application/json");
        if (r && r->status == 200) ++ok;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok, 40);
  service.stop();
}
