#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lprotector/vstore.hpp"

namespace lprotector {

enum class ParseStatus { Parsed, Fallback };

std::string_view to_string(ParseStatus status) noexcept;

/// Outcome of classifying one snippet.
struct SampleResult {
    std::string sample_id;
    /// Absent when the ground truth is unknown (ad hoc detection).
    std::optional<int> true_label;
    int predicted_label = 0;
    ParseStatus parse_status = ParseStatus::Parsed;
    /// Re-asks spent on getting a parseable verdict.
    int verdict_retries = 0;
    /// Present iff retrieval ran.
    std::optional<std::vector<RetrievalHit>> retrieval;
    std::optional<std::string> chosen_context;
    /// True when the rerank answer was unusable and rank 1 was taken instead.
    bool rerank_fallback = false;
    std::chrono::milliseconds latency{0};

    bool operator==(const SampleResult&) const = default;
};

/// Journal / CLI representation. Latency is wall-clock and therefore left out
/// when `include_latency` is false (reports that must be reproducible).
nlohmann::ordered_json to_json(const SampleResult& result, bool include_latency = true);
/// Throws Error{CorruptFile}.
SampleResult sample_result_from_json(const nlohmann::json& doc);

}  // namespace lprotector
