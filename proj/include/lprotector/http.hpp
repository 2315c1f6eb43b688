#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lprotector {

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
    std::string body;
    std::chrono::milliseconds timeout{60000};
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

/// Thrown by transports when no HTTP response was obtained at all.
class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& message, bool timed_out)
        : std::runtime_error(message), timed_out_(timed_out) {}

    bool timed_out() const noexcept { return timed_out_; }

private:
    bool timed_out_;
};

/// POST-only HTTP boundary. Remote providers talk to the network only through
/// this interface so tests can substitute a counting stub.
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport (http and https).
std::shared_ptr<HttpTransport> make_http_transport();

struct RetryPolicy {
    int max_retries = 3;
    std::chrono::milliseconds base_delay{500};
    double multiplier = 2.0;
    /// Defaults to std::this_thread::sleep_for.
    std::function<void(std::chrono::milliseconds)> sleep;
};

/// Retries connection failures, timeouts, 408, 429 and 5xx with exponential
/// backoff. Any other non-2xx status fails immediately.
///
/// Throws Error{Timeout} when the last attempt timed out, otherwise
/// Error{ProviderUnavailable}. `retries_used` receives the number of retries.
HttpResponse post_with_retries(HttpTransport& transport, const HttpRequest& request, const RetryPolicy& policy,
                               int* retries_used = nullptr);

/// Token-bucket rate limiter. acquire() blocks until a token is available.
class TokenBucket {
public:
    using Clock = std::chrono::steady_clock;

    TokenBucket(double tokens_per_second, double burst);

    void acquire();
    /// Non-blocking variant; returns false when the bucket is empty.
    bool try_acquire();

private:
    void refill(Clock::time_point now);

    std::mutex mutex_;
    double rate_;
    double capacity_;
    double tokens_;
    Clock::time_point last_;
};

struct ParsedUrl {
    std::string scheme_host_port;
    std::string path;
};

/// Splits "https://host:port/a/b" into "https://host:port" and "/a/b".
/// Throws Error{InvalidConfig} for anything that is not an http(s) URL.
ParsedUrl split_url(const std::string& url);

}  // namespace lprotector
