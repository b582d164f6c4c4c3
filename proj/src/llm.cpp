#include "colorgpt/llm.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "colorgpt/errors.hpp"
#include "colorgpt/log.hpp"
#include "colorgpt/rng.hpp"
#include "http_client.hpp"

namespace colorgpt {

using nlohmann::json;

std::string_view to_string(ChatMessage::Role role) {
  switch (role) {
    case ChatMessage::Role::System: return "system";
    case ChatMessage::Role::User: return "user";
    case ChatMessage::Role::Assistant: return "assistant";
  }
  return "user";
}

namespace {

ChatMessage::Role parse_role(std::string_view s) {
  if (s == "system") return ChatMessage::Role::System;
  if (s == "user") return ChatMessage::Role::User;
  if (s == "assistant") return ChatMessage::Role::Assistant;
  throw ParseError("unknown chat role '" + std::string(s) + "'");
}

json request_to_json(const ChatRequest& request) {
  json messages = json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return messages;
}

std::string hex16(std::uint64_t v) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
  return out;
}

}  // namespace

void ChatRequest::validate() const {
  if (messages.empty()) throw ValidationError("chat request has no messages");
  if (messages.front().role == ChatMessage::Role::Assistant) {
    throw ValidationError("chat request must start with a system or user message");
  }
}

std::string fingerprint(const ChatRequest& request) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& m : request.messages) {
    h = fnv1a64(to_string(m.role), h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
    h = fnv1a64(m.content, h);
    h = fnv1a64(std::string_view("\x1e", 1), h);
  }
  return hex16(h);
}

std::chrono::milliseconds RetryPolicy::delay(int attempt, double unit_random) const {
  const double cap = static_cast<double>(max_backoff.count());
  const double exp = static_cast<double>(base_backoff.count()) * std::ldexp(1.0, std::max(0, attempt - 1));
  const double ceiling = std::min(cap, exp);
  return std::chrono::milliseconds(static_cast<long long>(std::floor(unit_random * ceiling)));
}

void LlmProviderConfig::apply_env(bool model_from_env) {
  if (endpoint.empty()) {
    if (const char* v = std::getenv("LLM_API_URL")) endpoint = v;
  }
  if (api_key.empty()) {
    if (const char* v = std::getenv("LLM_API_KEY")) api_key = v;
  }
  if (model_from_env) {
    if (const char* v = std::getenv("LLM_MODEL")) model = v;
  }
}

void LlmProviderConfig::validate() const {
  if (!(temperature >= 0.0)) throw ValidationError("llm.temperature must be >= 0");
  if (retry.max_attempts < 1) throw ValidationError("llm.retry.max_attempts must be >= 1");
  if (max_tokens < 1) throw ValidationError("llm.max_tokens must be >= 1");
  if (kind == Kind::RemoteChat && endpoint.empty()) {
    throw ConfigError("remote chat provider needs an endpoint (LLM_API_URL)");
  }
}

// ---------------------------------------------------------------------------

MockProvider::MockProvider(std::unordered_map<std::string, std::string> fixtures, Mode mode,
                           std::string default_reply)
    : fixtures_(std::move(fixtures)), mode_(mode), default_reply_(std::move(default_reply)) {}

std::unordered_map<std::string, std::string> MockProvider::load_fixtures(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mock fixtures " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::unordered_map<std::string, std::string> out;
  try {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{' && json::accept(text)) {
      const auto j = json::parse(text);
      for (const auto& [k, v] : j.items()) out.emplace(k, v.get<std::string>());
      return out;
    }
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto j = json::parse(line);
      out.emplace(j.at("fingerprint").get<std::string>(), j.at("reply").get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ParseError("mock fixtures " + path.string() + ": " + e.what());
  }
  return out;
}

ChatResponse MockProvider::complete(const ChatRequest& request) {
  const auto fp = fingerprint(request);
  ChatResponse res;
  res.finish_reason = "stop";
  if (auto it = fixtures_.find(fp); it != fixtures_.end()) {
    res.content = it->second;
    return res;
  }
  {
    std::shared_lock lock(oracle_mutex_);
    if (auto it = oracle_.find(fp); it != oracle_.end()) {
      res.content = it->second;
      return res;
    }
  }
  if (mode_ == Mode::Strict) {
    throw ProviderError("mock provider: no reply registered for fingerprint " + fp);
  }
  res.content = default_reply_;
  return res;
}

void MockProvider::set_oracle(const std::string& fp, std::string reply) {
  std::unique_lock lock(oracle_mutex_);
  oracle_[fp] = std::move(reply);
}

std::size_t MockProvider::oracle_size() const {
  std::shared_lock lock(oracle_mutex_);
  return oracle_.size();
}

// ---------------------------------------------------------------------------

RemoteChatProvider::RemoteChatProvider(LlmProviderConfig cfg, Sleeper sleeper,
                                       std::uint64_t jitter_seed)
    : cfg_(std::move(cfg)), sleep_(std::move(sleeper)), jitter_state_(splitmix64(jitter_seed)) {
  cfg_.validate();
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::string RemoteChatProvider::request_body(const ChatRequest& request) const {
  return json{{"model", cfg_.model},
              {"messages", request_to_json(request)},
              {"temperature", cfg_.temperature},
              {"max_tokens", cfg_.max_tokens}}
      .dump();
}

ChatResponse RemoteChatProvider::complete(const ChatRequest& request) {
  request.validate();
  const std::string body = request_body(request);
  std::vector<std::pair<std::string, std::string>> headers;
  if (!cfg_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + cfg_.api_key);

  std::string last_error;
  for (int attempt = 1; attempt <= cfg_.retry.max_attempts; ++attempt) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = detail::post_json(cfg_.endpoint, headers, body, cfg_.timeout_s);
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    log_info("llm attempt " + std::to_string(attempt) + " status " + std::to_string(res.status) +
             " latency " + std::to_string(static_cast<long>(latency)) + "ms");

    if (res.status == 200) {
      try {
        const auto j = json::parse(res.body);
        const auto& choice = j.at("choices").at(0);
        ChatResponse out;
        out.content = choice.at("message").at("content").get<std::string>();
        out.finish_reason = choice.value("finish_reason", "");
        if (const auto u = j.find("usage"); u != j.end() && u->is_object()) {
          out.usage.prompt_tokens = u->value("prompt_tokens", 0);
          out.usage.completion_tokens = u->value("completion_tokens", 0);
          out.usage.total_tokens = u->value("total_tokens", 0);
        }
        out.latency_ms = latency;
        out.attempts = attempt;
        return out;
      } catch (const json::exception& e) {
        throw ProviderError(name() + ": malformed chat response: " + e.what());
      }
    }
    if (res.status == 401 || res.status == 403) {
      throw ConfigError(name() + ": authentication failed (HTTP " + std::to_string(res.status) + ")");
    }
    const bool transient = res.status == 0 || res.status == 408 || res.status == 429 || res.status >= 500;
    last_error = res.status ? "HTTP " + std::to_string(res.status) : res.error;
    if (!transient) throw ProviderError(name() + ": request rejected: " + last_error);
    if (attempt == cfg_.retry.max_attempts) break;

    double u;
    {
      std::lock_guard lock(rng_mutex_);
      jitter_state_ = splitmix64(jitter_state_);
      u = static_cast<double>(jitter_state_ >> 11) * 0x1.0p-53;
    }
    const auto wait = cfg_.retry.delay(attempt, u);
    log_warn(name() + ": attempt " + std::to_string(attempt) + " failed (" + last_error +
             "), retrying in " + std::to_string(wait.count()) + "ms");
    sleep_(wait);
  }
  throw TransportError(name() + ": gave up after " + std::to_string(cfg_.retry.max_attempts) +
                       " attempt(s): " + last_error);
}

// ---------------------------------------------------------------------------

RecordingProvider::RecordingProvider(std::shared_ptr<ChatProvider> inner,
                                     const std::filesystem::path& log_path)
    : inner_(std::move(inner)), out_(log_path, std::ios::app) {
  if (!out_) throw IoError("cannot open audit log " + log_path.string());
}

ChatResponse RecordingProvider::complete(const ChatRequest& request) {
  auto res = inner_->complete(request);
  json line{{"fingerprint", fingerprint(request)},
            {"request", request_to_json(request)},
            {"response",
             {{"content", res.content},
              {"finish_reason", res.finish_reason},
              {"usage",
               {{"prompt_tokens", res.usage.prompt_tokens},
                {"completion_tokens", res.usage.completion_tokens},
                {"total_tokens", res.usage.total_tokens}}}}}};
  std::lock_guard lock(mutex_);
  out_ << line.dump() << '\n';
  out_.flush();
  return res;
}

ReplayProvider::ReplayProvider(const std::filesystem::path& log_path) {
  std::ifstream in(log_path);
  if (!in) throw IoError("cannot open audit log " + log_path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      ChatResponse r;
      const auto& resp = j.at("response");
      r.content = resp.at("content").get<std::string>();
      r.finish_reason = resp.value("finish_reason", "");
      if (resp.contains("usage")) {
        r.usage.prompt_tokens = resp["usage"].value("prompt_tokens", 0);
        r.usage.completion_tokens = resp["usage"].value("completion_tokens", 0);
        r.usage.total_tokens = resp["usage"].value("total_tokens", 0);
      }
      std::string fp;
      if (j.contains("request")) {
        ChatRequest req;
        for (const auto& m : j["request"]) {
          req.messages.push_back({parse_role(m.at("role").get<std::string>()),
                                  m.at("content").get<std::string>()});
        }
        fp = fingerprint(req);
      } else {
        fp = j.at("fingerprint").get<std::string>();
      }
      replies_.emplace(fp, std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(log_path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

ChatResponse ReplayProvider::complete(const ChatRequest& request) {
  const auto fp = fingerprint(request);
  auto it = replies_.find(fp);
  if (it == replies_.end()) throw ProviderError("replay: no recorded reply for fingerprint " + fp);
  return it->second;
}

// ---------------------------------------------------------------------------

RateLimiter::RateLimiter(double per_minute)
    : rate_per_s_(per_minute / 60.0),
      capacity_(std::max(1.0, per_minute)),
      tokens_(std::max(1.0, per_minute)),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_per_s_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    tokens_ = std::min(capacity_,
                       tokens_ + std::chrono::duration<double>(now - last_).count() * rate_per_s_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait_s = (1.0 - tokens_) / rate_per_s_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    lock.lock();
  }
}

std::shared_ptr<ChatProvider> make_provider(const LlmProviderConfig& cfg,
                                            std::shared_ptr<MockProvider> mock,
                                            const std::filesystem::path& record,
                                            const std::filesystem::path& replay) {
  std::shared_ptr<ChatProvider> provider;
  if (!replay.empty()) {
    provider = std::make_shared<ReplayProvider>(replay);
  } else if (cfg.kind == LlmProviderConfig::Kind::Mock) {
    provider = mock ? mock : std::make_shared<MockProvider>();
  } else {
    provider = std::make_shared<RemoteChatProvider>(cfg);
  }
  if (!record.empty()) provider = std::make_shared<RecordingProvider>(provider, record);
  return provider;
}

ChatResponse complete_chat(ChatProvider& provider, const ChatRequest& request,
                           RateLimiter* limiter) {
  request.validate();
  if (limiter) limiter->acquire();
  return provider.complete(request);
}

// ---------------------------------------------------------------------------

namespace {

// End index (exclusive) of the balanced value starting at `start`, or npos.
std::size_t balanced_end(std::string_view s, std::size_t start) {
  std::string stack;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': stack.push_back('}'); break;
      case '[': stack.push_back(']'); break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::string_view::npos;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::string_view::npos;
}

std::optional<nlohmann::ordered_json> scan(std::string_view s) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '{' && s[i] != '[') continue;
    const auto end = balanced_end(s, i);
    if (end == std::string_view::npos) continue;
    auto v = nlohmann::ordered_json::parse(s.substr(i, end - i), nullptr, false);
    if (!v.is_discarded()) return v;
  }
  return std::nullopt;
}

}  // namespace

JsonExtraction extract_json(std::string_view reply) noexcept {
  JsonExtraction out;
  try {
    out.raw = std::string(reply);
    // fenced blocks first
    std::size_t pos = 0;
    while ((pos = reply.find("```", pos)) != std::string_view::npos) {
      const auto body_start = reply.find('\n', pos + 3);
      if (body_start == std::string_view::npos) break;
      const auto close = reply.find("```", body_start);
      const auto body = reply.substr(body_start + 1, close == std::string_view::npos
                                                         ? std::string_view::npos
                                                         : close - body_start - 1);
      if (auto v = scan(body)) {
        out.value = std::move(v);
        return out;
      }
      if (close == std::string_view::npos) break;
      pos = close + 3;
    }
    if (auto v = scan(reply)) {
      out.value = std::move(v);
      return out;
    }
    out.error = "no parseable JSON object or array in reply";
  } catch (const std::exception& e) {
    out.value.reset();
    out.error = std::string("JSON extraction failed: ") + e.what();
  } catch (...) {
    out.value.reset();
    out.error = "JSON extraction failed";
  }
  return out;
}

}  // namespace colorgpt
