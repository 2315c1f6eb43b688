#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "lprotector/http.hpp"
#include "lprotector/prompt.hpp"
#include "lprotector/result.hpp"

namespace lprotector {

enum class ProviderKind { Remote, Scripted, Heuristic };

std::string_view to_string(ProviderKind kind) noexcept;

struct ProviderConfig {
    ProviderKind kind = ProviderKind::Heuristic;
    std::optional<std::string> endpoint;
    std::optional<std::string> model_id;
    double temperature = 0.0;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60000};
    /// Remote only: token-bucket rate limit.
    double requests_per_second = 5.0;
    double burst = 5.0;
    /// Scripted only: JSON object {prompt_sha256: response_text}.
    std::optional<std::filesystem::path> script_path;
    /// Scripted only: answer for prompts missing from the script.
    std::string script_default;
    /// Heuristic only: a context similarity above this means vulnerable.
    double heuristic_threshold = 0.82;  // separates planted idioms under the hashed embedder

    /// Throws Error{InvalidConfig}.
    void validate() const;
};

struct Verdict {
    int label = 0;
    std::string raw_response;
    ParseStatus parse_status = ParseStatus::Parsed;
    int retries_used = 0;
};

/// Per-call telemetry. Token counts are only known for remote calls that
/// report usage.
struct CallRecord {
    ProviderKind kind = ProviderKind::Scripted;
    std::chrono::milliseconds latency{0};
    std::optional<long> prompt_tokens;
    std::optional<long> completion_tokens;
    int retries = 0;
};

/// Chat-completion boundary. Implementations must accept concurrent
/// complete() calls.
class LlmProvider {
public:
    using CallObserver = std::function<void(const CallRecord&)>;

    virtual ~LlmProvider() = default;

    /// Throws Error{ProviderUnavailable} or Error{Timeout}.
    virtual std::string complete(const PromptSpec& prompt) = 0;
    virtual ProviderKind kind() const noexcept = 0;
    /// Model identity recorded in reports.
    virtual std::string model() const = 0;

    /// Called after every completed call; must be thread-safe.
    void set_call_observer(CallObserver observer) { observer_ = std::move(observer); }

protected:
    void notify(const CallRecord& record) const {
        if (observer_) observer_(record);
    }

private:
    CallObserver observer_;
};

/// Answers by looking the prompt digest up in a fixed table. No network.
class ScriptedProvider final : public LlmProvider {
public:
    ScriptedProvider(std::map<std::string, std::string> responses, std::string default_response);
    /// Reads a script file. Throws Error{MissingFile} or Error{CorruptFile}.
    static std::map<std::string, std::string> load_script(const std::filesystem::path& path);

    std::string complete(const PromptSpec& prompt) override;
    ProviderKind kind() const noexcept override { return ProviderKind::Scripted; }
    std::string model() const override;

    std::size_t calls() const noexcept { return calls_.load(); }
    std::size_t misses() const noexcept { return misses_.load(); }

private:
    std::map<std::string, std::string> responses_;
    std::string default_response_;
    std::string script_digest_;
    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> misses_{0};
};

/// Offline stand-in that reads the retrieval scores printed in the prompt.
/// Classification: `VERDICT: 1` iff the best similarity score in the CONTEXT
/// section exceeds the threshold (no CONTEXT means 0). With chain-of-thought
/// on, numbered reasoning lines precede the verdict. Rerank: picks the
/// candidate with the highest printed score, lowest number on ties.
class HeuristicProvider final : public LlmProvider {
public:
    explicit HeuristicProvider(double threshold);

    std::string complete(const PromptSpec& prompt) override;
    ProviderKind kind() const noexcept override { return ProviderKind::Heuristic; }
    std::string model() const override;

    double threshold() const noexcept { return threshold_; }

private:
    double threshold_;
};

/// OpenAI-style chat completions: POST {"model", "temperature", "messages":
/// [system, user]} and read choices[0].message.content. Transient failures
/// are retried with exponential backoff; calls pass through a token bucket.
class RemoteProvider final : public LlmProvider {
public:
    RemoteProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport, std::optional<std::string> api_key);

    std::string complete(const PromptSpec& prompt) override;
    ProviderKind kind() const noexcept override { return ProviderKind::Remote; }
    std::string model() const override { return *config_.model_id; }

    void set_retry_sleep(std::function<void(std::chrono::milliseconds)> sleep) { retry_.sleep = std::move(sleep); }

private:
    ProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::optional<std::string> api_key_;
    RetryPolicy retry_;
    TokenBucket limiter_;
};

/// Remote providers read the credential from LPROTECTOR_API_KEY.
std::unique_ptr<LlmProvider> make_provider(const ProviderConfig& config,
                                           std::shared_ptr<HttpTransport> transport = nullptr);

/// One-shot convenience over make_provider.
std::string complete(const PromptSpec& prompt, const ProviderConfig& config);

/// The last non-empty line, trimmed, must read `VERDICT: 0` or `VERDICT: 1`
/// (case-insensitive, any spacing after the colon).
/// Throws Error{ParseFailure}.
Verdict parse_verdict(std::string_view response);

/// The last non-empty line must read `CHOICE: <k>`; returns k.
/// Throws Error{ParseFailure} or Error{OutOfRange} unless 1 <= k <= n_candidates.
std::size_t parse_choice(std::string_view response, std::size_t n_candidates);

/// The last line of `response` with content, trimmed; empty if none.
std::string_view last_nonempty_line(std::string_view response) noexcept;

}  // namespace lprotector
