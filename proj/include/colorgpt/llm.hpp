#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace colorgpt {

struct ChatMessage {
  enum class Role { System, User, Assistant };
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

std::string_view to_string(ChatMessage::Role role);

struct ChatRequest {
  std::vector<ChatMessage> messages;

  /// Non-empty and starting with a system or user message.
  void validate() const;
};

struct TokenUsage {
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int total_tokens = 0;
};

struct ChatResponse {
  std::string content;
  std::string finish_reason;
  TokenUsage usage;
  double latency_ms = 0.0;
  int attempts = 1;
};

/// Stable 64-bit FNV-1a over the role/content sequence, rendered as 16 hex
/// digits. Fixture files and audit logs key on this.
std::string fingerprint(const ChatRequest& request);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds base_backoff{500};
  std::chrono::milliseconds max_backoff{30000};

  /// Full jitter: uniform in [0, min(max_backoff, base * 2^(attempt-1))].
  /// `attempt` is the 1-based number of the attempt that just failed.
  std::chrono::milliseconds delay(int attempt, double unit_random) const;
};

struct LlmProviderConfig {
  enum class Kind { RemoteChat, Mock };

  Kind kind = Kind::Mock;
  std::string model = "gpt-4o-2024-08-06";
  std::string endpoint;  // full chat-completions URL
  std::string api_key;
  double temperature = 0.0;
  int max_tokens = 2048;
  double timeout_s = 60.0;
  RetryPolicy retry;

  /// Fills endpoint/api_key/model from LLM_API_URL / LLM_API_KEY / LLM_MODEL
  /// where they are empty (model only when `model_from_env`).
  void apply_env(bool model_from_env = true);
  void validate() const;
};

/// A chat backend. Implementations are shareable across threads.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual std::string name() const = 0;
  virtual ChatResponse complete(const ChatRequest& request) = 0;
};

/// Canned replies keyed by request fingerprint.
///
/// Unknown fingerprints resolve, in order, against the oracle map (filled at
/// run time by harnesses that know the ground truth), then the default reply;
/// in strict mode a miss is a ProviderError naming the fingerprint.
class MockProvider final : public ChatProvider {
 public:
  enum class Mode { Strict, DefaultReply };

  explicit MockProvider(std::unordered_map<std::string, std::string> fixtures = {},
                        Mode mode = Mode::Strict, std::string default_reply = {});

  /// Fixture file: JSON object {fingerprint: reply} or JSON Lines of
  /// {"fingerprint": ..., "reply": ...}.
  static std::unordered_map<std::string, std::string> load_fixtures(
      const std::filesystem::path& path);

  std::string name() const override { return "mock"; }
  ChatResponse complete(const ChatRequest& request) override;

  void set_oracle(const std::string& fingerprint, std::string reply);
  std::size_t oracle_size() const;

 private:
  const std::unordered_map<std::string, std::string> fixtures_;
  const Mode mode_;
  const std::string default_reply_;
  mutable std::shared_mutex oracle_mutex_;
  std::unordered_map<std::string, std::string> oracle_;
};

/// OpenAI-style chat completions over HTTP with retries.
class RemoteChatProvider final : public ChatProvider {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit RemoteChatProvider(LlmProviderConfig cfg, Sleeper sleeper = {},
                              std::uint64_t jitter_seed = 0);

  std::string name() const override { return "remote:" + cfg_.model; }
  ChatResponse complete(const ChatRequest& request) override;

  /// Exact JSON body sent for a request.
  std::string request_body(const ChatRequest& request) const;

 private:
  LlmProviderConfig cfg_;
  Sleeper sleep_;
  std::mutex rng_mutex_;
  std::uint64_t jitter_state_;
};

/// Writes every exchange of the wrapped provider to a JSON Lines audit log.
class RecordingProvider final : public ChatProvider {
 public:
  RecordingProvider(std::shared_ptr<ChatProvider> inner, const std::filesystem::path& log_path);

  std::string name() const override { return inner_->name(); }
  ChatResponse complete(const ChatRequest& request) override;

 private:
  std::shared_ptr<ChatProvider> inner_;
  std::mutex mutex_;
  std::ofstream out_;
};

/// Serves replies from an audit log written by RecordingProvider.
class ReplayProvider final : public ChatProvider {
 public:
  explicit ReplayProvider(const std::filesystem::path& log_path);

  std::string name() const override { return "replay"; }
  ChatResponse complete(const ChatRequest& request) override;
  std::size_t size() const { return replies_.size(); }

 private:
  std::unordered_map<std::string, ChatResponse> replies_;
};

/// Blocks callers so that at most `per_minute` acquisitions happen per
/// rolling minute (token bucket, burst = per_minute). 0 disables limiting.
class RateLimiter {
 public:
  explicit RateLimiter(double per_minute = 0.0);
  void acquire();

 private:
  double rate_per_s_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mutex_;
};

/// Builds the provider described by `cfg` (mock fixtures are loaded from
/// `mock_fixtures` when given), wrapped for --record / --replay.
std::shared_ptr<ChatProvider> make_provider(const LlmProviderConfig& cfg,
                                            std::shared_ptr<MockProvider> mock = nullptr,
                                            const std::filesystem::path& record = {},
                                            const std::filesystem::path& replay = {});

/// Sends a request through the provider after validating it.
ChatResponse complete_chat(ChatProvider& provider, const ChatRequest& request,
                           RateLimiter* limiter = nullptr);

/// Outcome of extract_json: a value, or an error plus the raw reply.
struct JsonExtraction {
  std::optional<nlohmann::ordered_json> value;
  std::string error;
  std::string raw;

  bool ok() const { return value.has_value(); }
};

/// First syntactically complete JSON object or array in a reply. Fenced code
/// blocks are tried first, then the text is scanned for balanced
/// braces/brackets. Never throws.
JsonExtraction extract_json(std::string_view reply) noexcept;

}  // namespace colorgpt
