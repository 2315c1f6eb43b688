#include "lprotector/metrics.hpp"

#include "lprotector/error.hpp"

#include <cmath>
#include <cstdio>

namespace lprotector {

ConfusionCounts confusion(std::span<const SampleResult> results) {
    ConfusionCounts counts;
    for (const auto& r : results) {
        if (!r.true_label || (*r.true_label != 0 && *r.true_label != 1)) {
            throw Error(Errc::InvalidInput, "result '" + r.sample_id + "' has no 0/1 ground-truth label");
        }
        if (r.predicted_label != 0 && r.predicted_label != 1) {
            throw Error(Errc::InvalidInput, "result '" + r.sample_id + "' has a non-binary prediction");
        }
        const bool actual = *r.true_label == 1;
        const bool predicted = r.predicted_label == 1;
        if (predicted && actual) {
            ++counts.tp;
        } else if (predicted) {
            ++counts.fp;
        } else if (actual) {
            ++counts.fn;
        } else {
            ++counts.tn;
        }
    }
    return counts;
}

double f1_score(double precision, double recall) noexcept {
    const double sum = precision + recall;
    return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

MetricsReport compute_metrics(const ConfusionCounts& counts, std::size_t parse_fallbacks) {
    const auto total = counts.total();
    if (total == 0) {
        throw Error(Errc::EmptyCounts, "cannot compute metrics over zero samples");
    }
    MetricsReport report;
    report.counts = counts;
    const auto n = static_cast<double>(total);
    report.accuracy = static_cast<double>(counts.tp + counts.tn) / n;
    if (counts.tp + counts.fp == 0) {
        report.degenerate_flags.insert(kPrecisionUndefined);
    } else {
        report.precision = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fp);
    }
    if (counts.tp + counts.fn == 0) {
        report.degenerate_flags.insert(kRecallUndefined);
    } else {
        report.recall = static_cast<double>(counts.tp) / static_cast<double>(counts.tp + counts.fn);
    }
    if (report.precision + report.recall == 0.0) {
        report.degenerate_flags.insert(kF1Undefined);
    } else {
        report.f1 = f1_score(report.precision, report.recall);
    }
    report.parse_fallbacks = parse_fallbacks;
    report.parse_fallback_rate = static_cast<double>(parse_fallbacks) / n;
    report.predicted_positive_rate = static_cast<double>(counts.tp + counts.fp) / n;
    return report;
}

MetricsReport evaluate_results(std::span<const SampleResult> results) {
    std::size_t fallbacks = 0;
    for (const auto& r : results) {
        if (r.parse_status == ParseStatus::Fallback) ++fallbacks;
    }
    return compute_metrics(confusion(results), fallbacks);
}

F1Check f1_consistency(double precision, double recall, double reported_f1, double tolerance) {
    F1Check check;
    check.expected_f1 = f1_score(precision, recall);
    check.residual = std::abs(check.expected_f1 - reported_f1);
    check.consistent = check.residual <= tolerance;
    return check;
}

namespace {

bool is_rate(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

ConsistencyResult consistency_check(double accuracy, double precision, double recall, std::size_t n_total,
                                    std::size_t positives, double tolerance) {
    if (!is_rate(accuracy) || !is_rate(precision) || !is_rate(recall)) {
        throw Error(Errc::InvalidInput, "accuracy, precision and recall must lie in [0, 1]");
    }
    if (n_total == 0 || positives > n_total) {
        throw Error(Errc::InvalidInput, "need 0 <= positives <= n_total and n_total > 0");
    }
    const double n = static_cast<double>(n_total);
    const double pos = static_cast<double>(positives);
    const double neg = n - pos;
    // Slack for counts that were derived from rounded rates.
    const double count_slack = tolerance * n;

    ConsistencyResult result;
    result.tp = recall * pos;
    result.fn = pos - result.tp;

    if (precision == 0.0) {
        // Any fp >= 1 is compatible with zero precision, provided tp is zero.
        if (result.tp > count_slack) {
            result.reason = "zero precision requires zero true positives";
            result.residual = std::abs(result.tp / n);
            return result;
        }
        const double tn_needed = accuracy * n - result.tp;
        result.tn = tn_needed;
        result.fp = neg - tn_needed;
        result.consistent = result.fp >= 1.0 - count_slack && result.fp <= neg + count_slack;
        result.residual = result.consistent ? 0.0 : std::abs(result.fp < 1.0 ? (1.0 - result.fp) : (result.fp - neg)) / n;
        if (!result.consistent) result.reason = "accuracy leaves no room for a false positive";
        return result;
    }

    result.fp = result.tp * (1.0 / precision - 1.0);
    result.tn = neg - result.fp;
    const double reconstructed = (result.tp + result.tn) / n;
    result.residual = std::abs(reconstructed - accuracy);

    if (result.fp > neg + count_slack || result.tn < -count_slack) {
        result.reason = "implied false positives exceed the negative class";
    } else if (result.residual > tolerance) {
        result.reason = "reconstructed accuracy differs from the reported accuracy";
    } else {
        result.consistent = true;
    }
    return result;
}

nlohmann::ordered_json to_json(const MetricsReport& report) {
    nlohmann::ordered_json doc;
    doc["counts"] = {{"tp", report.counts.tp},
                     {"fp", report.counts.fp},
                     {"tn", report.counts.tn},
                     {"fn", report.counts.fn},
                     {"total", report.counts.total()}};
    doc["accuracy"] = report.accuracy;
    doc["precision"] = report.precision;
    doc["recall"] = report.recall;
    doc["f1"] = report.f1;
    doc["parse_fallbacks"] = report.parse_fallbacks;
    doc["parse_fallback_rate"] = report.parse_fallback_rate;
    doc["predicted_positive_rate"] = report.predicted_positive_rate;
    doc["degenerate_flags"] = std::vector<std::string>(report.degenerate_flags.begin(), report.degenerate_flags.end());
    return doc;
}

MetricsRow to_row(std::string label, const MetricsReport& report) {
    return {std::move(label), report.accuracy, report.precision, report.recall, report.f1};
}

std::string format_percent(double fraction) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", fraction * 100.0);
    return buffer;
}

std::string render_markdown_table(const std::string& first_column, std::span<const MetricsRow> rows) {
    std::string out = "| " + first_column + " | Accuracy | Precision | Recall | F1 Score |\n";
    out += "|---|---:|---:|---:|---:|\n";
    for (const auto& row : rows) {
        out += "| " + row.label + " | " + format_percent(row.accuracy) + " | " + format_percent(row.precision) +
               " | " + format_percent(row.recall) + " | " + format_percent(row.f1) + " |\n";
    }
    return out;
}

const std::vector<MetricsRow>& published_baselines() {
    static const std::vector<MetricsRow> kRows = {
        {"VulDeePecker (published)", 0.8119, 0.3844, 0.1275, 0.1915},
        {"Reveal (published)", 0.8714, 0.1722, 0.3404, 0.2287},
    };
    return kRows;
}

}  // namespace lprotector
