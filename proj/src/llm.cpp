#include "lprotector/llm.hpp"

#include "lprotector/embed.hpp"
#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cstdlib>

namespace lprotector {

std::string_view to_string(ProviderKind kind) noexcept {
    switch (kind) {
        case ProviderKind::Remote: return "remote";
        case ProviderKind::Scripted: return "scripted";
        case ProviderKind::Heuristic: return "heuristic";
    }
    return "unknown";
}

void ProviderConfig::validate() const {
    if (!(temperature >= 0.0)) throw Error(Errc::InvalidConfig, "temperature must be >= 0");
    if (max_retries < 0) throw Error(Errc::InvalidConfig, "max_retries must be >= 0");
    if (kind == ProviderKind::Remote) {
        if (!endpoint || endpoint->empty()) throw Error(Errc::InvalidConfig, "remote provider needs an endpoint");
        if (!model_id || model_id->empty()) throw Error(Errc::InvalidConfig, "remote provider needs a model id");
        if (!(requests_per_second > 0.0)) throw Error(Errc::InvalidConfig, "requests_per_second must be > 0");
    }
}

std::string_view last_nonempty_line(std::string_view response) noexcept {
    while (!response.empty()) {
        const auto pos = response.find_last_of('\n');
        const auto line = pos == std::string_view::npos ? response : response.substr(pos + 1);
        if (!is_blank(line)) return trim(line);
        if (pos == std::string_view::npos) break;
        response = response.substr(0, pos);
    }
    return {};
}

namespace {

// Returns the trimmed text after "<keyword>:" on the final line, if the line
// starts with that keyword (case-insensitive).
std::optional<std::string_view> tagged_value(std::string_view response, std::string_view keyword) {
    const auto line = last_nonempty_line(response);
    if (line.size() <= keyword.size() || line[keyword.size()] != ':') return std::nullopt;
    for (std::size_t i = 0; i < keyword.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(line[i])) != keyword[i]) return std::nullopt;
    }
    return trim(line.substr(keyword.size() + 1));
}

std::string excerpt(std::string_view text) {
    constexpr std::size_t kMax = 80;
    std::string out(text.substr(0, kMax));
    if (text.size() > kMax) out += "...";
    return out;
}

}  // namespace

Verdict parse_verdict(std::string_view response) {
    const auto value = tagged_value(response, "verdict");
    if (!value || (*value != "0" && *value != "1")) {
        throw Error(Errc::ParseFailure, "no verdict line in response: '" + excerpt(last_nonempty_line(response)) + "'");
    }
    Verdict verdict;
    verdict.label = *value == "1" ? 1 : 0;
    verdict.raw_response = std::string(response);
    verdict.parse_status = ParseStatus::Parsed;
    return verdict;
}

std::size_t parse_choice(std::string_view response, std::size_t n_candidates) {
    const auto value = tagged_value(response, "choice");
    if (!value || value->empty() ||
        !std::all_of(value->begin(), value->end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw Error(Errc::ParseFailure, "no choice line in response: '" + excerpt(last_nonempty_line(response)) + "'");
    }
    std::size_t choice = 0;
    const auto [ptr, ec] = std::from_chars(value->data(), value->data() + value->size(), choice);
    (void)ptr;
    if (ec != std::errc() || choice < 1 || choice > n_candidates) {
        throw Error(Errc::OutOfRange, "choice " + std::string(*value) + " is outside 1.." + std::to_string(n_candidates));
    }
    return choice;
}

ScriptedProvider::ScriptedProvider(std::map<std::string, std::string> responses, std::string default_response)
    : responses_(std::move(responses)), default_response_(std::move(default_response)) {
    std::string canonical;
    for (const auto& [digest, text] : responses_) canonical += digest + '\0' + text + '\0';
    canonical += default_response_;
    script_digest_ = sha256_hex(canonical);
}

std::map<std::string, std::string> ScriptedProvider::load_script(const std::filesystem::path& path) {
    const auto text = read_file(path);
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw Error(Errc::CorruptFile, path.string() + " must be a JSON object of prompt digest -> response");
    }
    std::map<std::string, std::string> responses;
    for (const auto& [digest, response] : doc.items()) {
        if (!response.is_string()) throw Error(Errc::CorruptFile, "response for " + digest + " is not a string");
        responses.emplace(digest, response.get<std::string>());
    }
    return responses;
}

std::string ScriptedProvider::complete(const PromptSpec& prompt) {
    ++calls_;
    auto it = responses_.find(prompt_digest(prompt));
    std::string out;
    if (it == responses_.end()) {
        ++misses_;
        out = default_response_;
    } else {
        out = it->second;
    }
    notify({ProviderKind::Scripted, std::chrono::milliseconds(0), std::nullopt, std::nullopt, 0});
    return out;
}

std::string ScriptedProvider::model() const { return "scripted:" + script_digest_.substr(0, 16); }

namespace {

bool starts_fence(std::string_view line, std::string& fence) {
    std::size_t n = 0;
    while (n < line.size() && line[n] == '`') ++n;
    if (n < 3) return false;
    fence.assign(n, '`');
    return true;
}

std::optional<double> parse_score_line(std::string_view line) {
    constexpr std::string_view kPrefix = "Similarity score:";
    if (!line.starts_with(kPrefix)) return std::nullopt;
    const auto value = trim(line.substr(kPrefix.size()));
    double score = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), score);
    if (ec != std::errc() || ptr != value.data() + value.size()) return std::nullopt;
    return score;
}

// Walks the prompt line by line. `on_line` sees (section, line) for every
// line outside fenced code, where section is the last "CONTEXT" or
// "CANDIDATE n" header seen and not yet closed.
template <typename Fn>
void scan_sections(std::string_view text, Fn&& on_line) {
    std::string fence;
    bool in_fence = false;
    std::string section;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(pos, end - pos);
        pos = end + 1;
        if (in_fence) {
            if (trim(line) == fence) in_fence = false;
            continue;
        }
        if (starts_fence(line, fence)) {
            in_fence = true;
            continue;
        }
        if (line == "CONTEXT" || line.starts_with("CANDIDATE ")) {
            section = std::string(line);
            continue;
        }
        if (line == "END CONTEXT" || line.starts_with("END CANDIDATE ")) {
            section.clear();
            continue;
        }
        on_line(section, line);
    }
}

std::string format_fixed(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

}  // namespace

HeuristicProvider::HeuristicProvider(double threshold) : threshold_(threshold) {}

std::string HeuristicProvider::model() const { return "heuristic:threshold=" + format_fixed(threshold_); }

std::string HeuristicProvider::complete(const PromptSpec& prompt) {
    std::string out;
    if (prompt.kind == PromptKind::Rerank) {
        std::size_t best = 0;
        double best_score = -2.0;
        scan_sections(prompt.user_text, [&](const std::string& section, std::string_view line) {
            if (!section.starts_with("CANDIDATE ")) return;
            if (auto score = parse_score_line(line)) {
                const auto number = static_cast<std::size_t>(std::strtoul(section.c_str() + 10, nullptr, 10));
                if (*score > best_score || (*score == best_score && number < best)) {
                    best = number;
                    best_score = *score;
                }
            }
        });
        if (best == 0) {
            out = "No candidate carries a similarity score.";
        } else {
            out = "Candidate " + std::to_string(best) + " has the highest similarity (" + format_fixed(best_score) +
                  ").\nCHOICE: " + std::to_string(best);
        }
    } else {
        std::optional<double> best;
        scan_sections(prompt.user_text, [&](const std::string& section, std::string_view line) {
            if (section != "CONTEXT") return;
            if (auto score = parse_score_line(line)) best = best ? std::max(*best, *score) : *score;
        });
        const bool vulnerable = best && *best > threshold_;
        if (prompt.cot_enabled) {
            out += "1. Inputs: the target function's parameters and any data it reads.\n";
            out += "2. Dangerous operations: compared against the retrieved known-vulnerable pattern.\n";
            if (best) {
                out += "3. Guards: similarity to the known vulnerable example is " + format_fixed(*best) + ".\n";
            } else {
                out += "3. Guards: no known vulnerable example is available for comparison.\n";
            }
            out += vulnerable ? "4. Conclusion: the function matches a known vulnerable pattern.\n"
                              : "4. Conclusion: no known vulnerable pattern matches.\n";
        }
        out += vulnerable ? "VERDICT: 1" : "VERDICT: 0";
    }
    notify({ProviderKind::Heuristic, std::chrono::milliseconds(0), std::nullopt, std::nullopt, 0});
    return out;
}

RemoteProvider::RemoteProvider(ProviderConfig config, std::shared_ptr<HttpTransport> transport,
                               std::optional<std::string> api_key)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      api_key_(std::move(api_key)),
      limiter_(config_.requests_per_second > 0 ? config_.requests_per_second : 1.0, config_.burst) {
    config_.validate();
    if (!transport_) throw Error(Errc::InvalidConfig, "remote provider needs a transport");
    retry_.max_retries = config_.max_retries;
}

std::string RemoteProvider::complete(const PromptSpec& prompt) {
    nlohmann::json body;
    body["model"] = *config_.model_id;
    body["temperature"] = config_.temperature;
    body["messages"] = nlohmann::json::array({
        {{"role", "system"}, {"content", prompt.system_text}},
        {{"role", "user"}, {"content", prompt.user_text}},
    });

    HttpRequest request;
    request.url = *config_.endpoint;
    request.timeout = config_.timeout;
    request.headers.emplace_back("Content-Type", "application/json");
    if (api_key_) request.headers.emplace_back("Authorization", "Bearer " + *api_key_);
    request.body = body.dump();

    limiter_.acquire();
    const auto start = std::chrono::steady_clock::now();
    int retries = 0;
    const auto response = post_with_retries(*transport_, request, retry_, &retries);
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

    CallRecord record{ProviderKind::Remote, latency, std::nullopt, std::nullopt, retries};
    std::string text;
    try {
        const auto doc = nlohmann::json::parse(response.body);
        text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (doc.contains("usage")) {
            const auto& usage = doc.at("usage");
            if (usage.contains("prompt_tokens")) record.prompt_tokens = usage.at("prompt_tokens").get<long>();
            if (usage.contains("completion_tokens")) {
                record.completion_tokens = usage.at("completion_tokens").get<long>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ProviderUnavailable, std::string("malformed completion response: ") + e.what());
    }
    notify(record);
    return text;
}

std::unique_ptr<LlmProvider> make_provider(const ProviderConfig& config, std::shared_ptr<HttpTransport> transport) {
    config.validate();
    switch (config.kind) {
        case ProviderKind::Scripted:
            if (config.script_path) {
                return std::make_unique<ScriptedProvider>(ScriptedProvider::load_script(*config.script_path),
                                                          config.script_default);
            }
            return std::make_unique<ScriptedProvider>(std::map<std::string, std::string>{}, config.script_default);
        case ProviderKind::Heuristic:
            return std::make_unique<HeuristicProvider>(config.heuristic_threshold);
        case ProviderKind::Remote: {
            std::optional<std::string> api_key;
            if (const char* key = std::getenv(kApiKeyEnv); key && *key) api_key = key;
            if (!transport) transport = make_http_transport();
            return std::make_unique<RemoteProvider>(config, std::move(transport), std::move(api_key));
        }
    }
    throw Error(Errc::InvalidConfig, "unknown provider kind");
}

std::string complete(const PromptSpec& prompt, const ProviderConfig& config) {
    return make_provider(config)->complete(prompt);
}

}  // namespace lprotector
