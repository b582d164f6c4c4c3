#include "http_client.hpp"

#include <chrono>
#include <httplib.h>

#include "colorgpt/errors.hpp"

namespace colorgpt::detail {
namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpResult post_json(const std::string& url,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     const std::string& body, double timeout_s) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(timeout_s));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  httplib::Headers hdrs;
  for (const auto& [k, v] : headers) hdrs.emplace(k, v);

  HttpResult out;
  auto res = client.Post(path, hdrs, body, "application/json");
  if (!res) {
    const auto err = res.error();
    out.error = httplib::to_string(err);
    out.timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                    err == httplib::Error::ConnectionTimeout;
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

}  // namespace colorgpt::detail
