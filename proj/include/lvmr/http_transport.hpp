#pragma once

#include <chrono>
#include <string>

namespace lvmr {

/// Timeout, retry and backoff policy shared by every HTTP client.
struct HttpPolicy {
    std::chrono::milliseconds timeout{30000};
    int retries = 2;  ///< extra attempts after the first one
    std::chrono::milliseconds initial_backoff{200};
    double backoff_factor = 2.0;
    std::string bearer_token;  ///< sent as "Authorization: Bearer ..." when non-empty
};

struct HttpEndpoint {
    std::string scheme_host_port;  ///< e.g. "http://127.0.0.1:8080"
    std::string path;              ///< e.g. "/embed"
};

/// Splits "http://host[:port][/path]". Throws ContractError for anything else.
HttpEndpoint parse_endpoint(const std::string& url);

/// Posts JSON bodies to one endpoint. Connection failures, timeouts, 408, 429
/// and 5xx responses are retried with exponential backoff; other statuses fail
/// at once. Exhausted or permanent failures throw TransportError.
///
/// Every call opens its own connection, so one instance can serve concurrent callers.
class HttpTransport {
  public:
    HttpTransport(const std::string& url, HttpPolicy policy);

    std::string post_json(const std::string& body) const;

    const HttpPolicy& policy() const noexcept { return m_policy; }

  private:
    HttpEndpoint m_endpoint;
    HttpPolicy m_policy;
};

}  // namespace lvmr
