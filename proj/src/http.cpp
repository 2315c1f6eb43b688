#include "lprotector/http.hpp"

#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <thread>

namespace lprotector {

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw Error(Errc::InvalidConfig, "not a URL: " + url);
    }
    const auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw Error(Errc::InvalidConfig, "unsupported URL scheme: " + scheme);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == scheme_end + 3) {
        throw Error(Errc::InvalidConfig, "URL has no host: " + url);
    }
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

namespace {

class HttplibTransport final : public HttpTransport {
public:
    HttpResponse post(const HttpRequest& request) override {
        const auto target = split_url(request.url);
        httplib::Client client(target.scheme_host_port);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(request.timeout);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(request.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());

        httplib::Headers headers;
        std::string content_type = "application/json";
        for (const auto& [name, value] : request.headers) {
            if (to_lower(name) == "content-type") {
                content_type = value;
            } else {
                headers.emplace(name, value);
            }
        }
        auto result = client.Post(target.path, headers, request.body, content_type);
        if (!result) {
            const auto error = result.error();
            throw TransportError("HTTP POST " + request.url + " failed: " + httplib::to_string(error),
                                 error == httplib::Error::Read || error == httplib::Error::Write ||
                                     error == httplib::Error::ConnectionTimeout);
        }
        return {result->status, result->body};
    }
};

bool is_transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

std::shared_ptr<HttpTransport> make_http_transport() { return std::make_shared<HttplibTransport>(); }

HttpResponse post_with_retries(HttpTransport& transport, const HttpRequest& request, const RetryPolicy& policy,
                               int* retries_used) {
    auto sleep = policy.sleep ? policy.sleep : [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    std::string last_error;
    bool last_timed_out = false;
    const int attempts = std::max(0, policy.max_retries) + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (retries_used) *retries_used = attempt;
        if (attempt > 0) {
            const double factor = std::pow(policy.multiplier, attempt - 1);
            sleep(std::chrono::milliseconds(
                static_cast<std::int64_t>(static_cast<double>(policy.base_delay.count()) * factor)));
        }
        try {
            auto response = transport.post(request);
            if (response.status >= 200 && response.status < 300) {
                return response;
            }
            last_timed_out = response.status == 408;
            last_error = "HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200);
            if (!is_transient_status(response.status)) {
                throw Error(Errc::ProviderUnavailable, request.url + " rejected the request: " + last_error);
            }
        } catch (const TransportError& e) {
            last_error = e.what();
            last_timed_out = e.timed_out();
        }
    }
    const auto message = request.url + " failed after " + std::to_string(attempts) + " attempts: " + last_error;
    throw Error(last_timed_out ? Errc::Timeout : Errc::ProviderUnavailable, message);
}

TokenBucket::TokenBucket(double tokens_per_second, double burst)
    : rate_(tokens_per_second), capacity_(std::max(1.0, burst)), tokens_(capacity_), last_(Clock::now()) {
    if (!(tokens_per_second > 0.0)) {
        throw Error(Errc::InvalidConfig, "rate limit must be positive");
    }
}

void TokenBucket::refill(Clock::time_point now) {
    const std::chrono::duration<double> elapsed = now - last_;
    tokens_ = std::min(capacity_, tokens_ + elapsed.count() * rate_);
    last_ = now;
}

bool TokenBucket::try_acquire() {
    std::lock_guard lock(mutex_);
    refill(Clock::now());
    if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return true;
    }
    return false;
}

void TokenBucket::acquire() {
    for (;;) {
        std::chrono::duration<double> wait{};
        {
            std::lock_guard lock(mutex_);
            refill(Clock::now());
            if (tokens_ >= 1.0) {
                tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
        }
        std::this_thread::sleep_for(wait);
    }
}

}  // namespace lprotector
