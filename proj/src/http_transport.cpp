#include "lvmr/http_transport.hpp"

#include <thread>

#include <httplib.h>

#include "lvmr/error.hpp"

namespace lvmr {

HttpEndpoint parse_endpoint(const std::string& url)
{
    constexpr std::string_view scheme = "http://";
    if (url.rfind(scheme, 0) != 0) {
        throw ContractError("unsupported endpoint '" + url + "': only http:// URLs are accepted");
    }
    const auto authority_end = url.find('/', scheme.size());
    auto authority = url.substr(scheme.size(), authority_end == std::string::npos ? std::string::npos
                                                                                   : authority_end - scheme.size());
    if (authority.empty()) {
        throw ContractError("endpoint '" + url + "' has no host");
    }
    std::string path = authority_end == std::string::npos ? "/" : url.substr(authority_end);
    return {std::string(scheme) + authority, path};
}

HttpTransport::HttpTransport(const std::string& url, HttpPolicy policy)
    : m_endpoint(parse_endpoint(url)), m_policy(std::move(policy))
{
    if (m_policy.retries < 0) {
        throw ContractError("retries must be non-negative");
    }
}

std::string HttpTransport::post_json(const std::string& body) const
{
    auto backoff = m_policy.initial_backoff;
    std::string last_failure;
    const int attempts = m_policy.retries + 1;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        httplib::Client client(m_endpoint.scheme_host_port);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(m_policy.timeout);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(m_policy.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        if (!m_policy.bearer_token.empty()) {
            client.set_bearer_token_auth(m_policy.bearer_token);
        }

        auto response = client.Post(m_endpoint.path, body, "application/json");
        if (response) {
            const int status = response->status;
            if (status >= 200 && status < 300) {
                return response->body;
            }
            const bool transient = status == 408 || status == 429 || status >= 500;
            last_failure = "HTTP status " + std::to_string(status);
            if (!transient) {
                throw TransportError(m_endpoint.scheme_host_port + m_endpoint.path + ": " + last_failure, false);
            }
        } else {
            last_failure = httplib::to_string(response.error());
        }

        if (attempt < attempts) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<std::chrono::milliseconds::rep>(static_cast<double>(backoff.count()) *
                                                            m_policy.backoff_factor));
        }
    }
    throw TransportError(m_endpoint.scheme_host_port + m_endpoint.path + ": " + last_failure + " after " +
                             std::to_string(attempts) + " attempt(s)",
                         true);
}

}  // namespace lvmr
