#include "lprotector/report.hpp"

namespace lprotector {

nlohmann::ordered_json to_json(const RunManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["command"] = manifest.command;
    doc["config"] = manifest.config;
    doc["seeds"] = manifest.seeds;
    doc["template_hashes"] = manifest.template_hashes;
    doc["provider"] = {{"kind", manifest.provider_kind}, {"model", manifest.provider_model}};
    doc["input_checksums"] = manifest.input_checksums;
    return doc;
}

namespace {

nlohmann::ordered_json baseline_rows() {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& row : published_baselines()) {
        rows.push_back({{"name", row.label},
                        {"accuracy", row.accuracy},
                        {"precision", row.precision},
                        {"recall", row.recall},
                        {"f1", row.f1},
                        {"source", "published Big-Vul results, cited for comparison"}});
    }
    return rows;
}

}  // namespace

nlohmann::ordered_json experiment_report_json(const ExperimentResult& experiment, const RunManifest& manifest,
                                              bool with_baselines) {
    nlohmann::ordered_json doc;
    doc["report"] = "experiment";
    doc["manifest"] = to_json(manifest);
    doc["metadata"] = to_json(experiment.metadata);
    doc["metrics"] = to_json(experiment.metrics);
    if (with_baselines) doc["baselines"] = baseline_rows();
    auto results = nlohmann::ordered_json::array();
    for (const auto& r : experiment.results) results.push_back(to_json(r, false));
    doc["results"] = std::move(results);
    return doc;
}

std::string experiment_report_markdown(const ExperimentResult& experiment, bool with_baselines,
                                       const std::string& label) {
    std::vector<MetricsRow> rows;
    if (with_baselines) rows = published_baselines();
    rows.push_back(to_row(label, experiment.metrics));
    auto out = render_markdown_table("Baseline", rows);
    const auto& m = experiment.metrics;
    out += "\nSamples: " + std::to_string(m.counts.total()) + " (TP " + std::to_string(m.counts.tp) + ", FP " +
           std::to_string(m.counts.fp) + ", TN " + std::to_string(m.counts.tn) + ", FN " +
           std::to_string(m.counts.fn) + "). Verdict fallbacks: " + std::to_string(m.parse_fallbacks) + " (" +
           format_percent(m.parse_fallback_rate) + "%). Predicted vulnerable: " +
           format_percent(m.predicted_positive_rate) + "%.\n";
    return out;
}

nlohmann::ordered_json ablation_report_json(const AblationReport& report, const RunManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["report"] = "ablation";
    doc["manifest"] = to_json(manifest);
    doc["cells_comparable"] = ablation_cells_comparable(report);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& cell : report.cells) {
        rows.push_back({{"variables", cell.name},
                        {"metadata", to_json(cell.experiment.metadata)},
                        {"metrics", to_json(cell.experiment.metrics)}});
    }
    doc["rows"] = std::move(rows);
    return doc;
}

std::string ablation_report_markdown(const AblationReport& report) {
    std::vector<MetricsRow> rows;
    for (const auto& cell : report.cells) rows.push_back(to_row(cell.name, cell.experiment.metrics));
    return render_markdown_table("Variables", rows);
}

bool ablation_cells_comparable(const AblationReport& report) {
    if (report.cells.empty()) return true;
    auto strip = [](const ExperimentMetadata& meta) {
        auto doc = to_json(meta);
        doc["config"].erase("rag_enabled");
        doc["config"].erase("cot_enabled");
        return doc;
    };
    const auto reference = strip(report.cells.front().experiment.metadata);
    for (const auto& cell : report.cells) {
        if (strip(cell.experiment.metadata) != reference) return false;
    }
    return true;
}

}  // namespace lprotector
