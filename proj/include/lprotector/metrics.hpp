#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lprotector/result.hpp"

namespace lprotector {

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const noexcept { return tp + fp + tn + fn; }
    std::size_t positives() const noexcept { return tp + fn; }
    std::size_t negatives() const noexcept { return tn + fp; }

    bool operator==(const ConfusionCounts&) const = default;
};

inline constexpr const char* kPrecisionUndefined = "precision_undefined";
inline constexpr const char* kRecallUndefined = "recall_undefined";
inline constexpr const char* kF1Undefined = "f1_undefined";

/// The four classification metrics as fractions in [0, 1]. An undefined ratio
/// (zero denominator) is reported as 0 and named in `degenerate_flags`, so
/// serialized reports never contain NaN.
struct MetricsReport {
    ConfusionCounts counts;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t parse_fallbacks = 0;
    double parse_fallback_rate = 0.0;
    /// Share of samples predicted vulnerable; exposes a model that calls
    /// everything vulnerable.
    double predicted_positive_rate = 0.0;
    std::set<std::string> degenerate_flags;

    bool operator==(const MetricsReport&) const = default;
};

/// Throws Error{InvalidInput} if a result lacks a ground-truth label or holds
/// a label outside {0, 1}.
ConfusionCounts confusion(std::span<const SampleResult> results);

/// Throws Error{EmptyCounts} when counts.total() == 0.
MetricsReport compute_metrics(const ConfusionCounts& counts, std::size_t parse_fallbacks = 0);

/// confusion + compute_metrics, counting Fallback verdicts.
MetricsReport evaluate_results(std::span<const SampleResult> results);

/// Harmonic mean; 0 when precision + recall == 0.
double f1_score(double precision, double recall) noexcept;

struct F1Check {
    double expected_f1 = 0.0;
    double residual = 0.0;
    bool consistent = false;
};

/// Does a reported F1 follow from its precision and recall? All values are
/// fractions; the default tolerance is 0.01 percentage points.
F1Check f1_consistency(double precision, double recall, double reported_f1, double tolerance = 1e-4);

struct ConsistencyResult {
    bool consistent = false;
    /// |reconstructed accuracy - reported accuracy|.
    double residual = 0.0;
    double tp = 0.0;
    double fp = 0.0;
    double tn = 0.0;
    double fn = 0.0;
    std::string reason;
};

/// Checks whether (accuracy, precision, recall) can come from one confusion
/// matrix with `positives` positives among `n_total` samples. The counts are
/// reconstructed as tp = recall * positives, fp = tp * (1/precision - 1),
/// tn = negatives - fp; the tuple is consistent when every count lies in
/// [0, class size] and (tp + tn) / n_total matches accuracy within
/// `tolerance`.
///
/// Throws Error{InvalidInput} for rates outside [0, 1], positives > n_total or
/// n_total == 0.
ConsistencyResult consistency_check(double accuracy, double precision, double recall, std::size_t n_total,
                                    std::size_t positives, double tolerance = 0.005);

nlohmann::ordered_json to_json(const MetricsReport& report);

/// A row of a percentage table (values are fractions).
struct MetricsRow {
    std::string label;
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

MetricsRow to_row(std::string label, const MetricsReport& report);

/// Fraction rendered as a percentage with two decimals: 0.89678 -> "89.68".
std::string format_percent(double fraction);

/// Markdown table with columns `first_column | Accuracy | Precision | Recall |
/// F1 Score`, values in percent.
std::string render_markdown_table(const std::string& first_column, std::span<const MetricsRow> rows);

/// Published results of the VulDeePecker and Reveal baselines on Big-Vul.
/// Used only as citation rows in comparison reports.
const std::vector<MetricsRow>& published_baselines();

}  // namespace lprotector
