#pragma once

#include <string>
#include <utility>
#include <vector>

namespace colorgpt::detail {

struct HttpResult {
  int status = 0;  // 0 when no HTTP response arrived
  std::string body;
  std::string error;
  bool timed_out = false;
};

/// Blocking JSON POST to a full URL ("http[s]://host[:port]/path").
HttpResult post_json(const std::string& url,
                     const std::vector<std::pair<std::string, std::string>>& headers,
                     const std::string& body, double timeout_s);

}  // namespace colorgpt::detail
