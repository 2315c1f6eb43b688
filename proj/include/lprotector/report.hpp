#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "lprotector/pipeline.hpp"

namespace lprotector {

/// Provenance embedded in every report. Wall-clock timestamps are kept out so
/// that equal manifests give byte-identical reports; the CLI writes them to a
/// separate timing file.
struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::map<std::string, std::uint64_t> seeds;
    std::map<std::string, std::string> template_hashes;
    std::string provider_kind;
    std::string provider_model;
    std::map<std::string, std::string> input_checksums;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);

/// JSON report of one experiment: manifest, run metadata, metrics and,
/// optionally, the published baseline rows for comparison.
nlohmann::ordered_json experiment_report_json(const ExperimentResult& experiment, const RunManifest& manifest,
                                              bool with_baselines);

/// Markdown table `Baseline | Accuracy | Precision | Recall | F1 Score`.
std::string experiment_report_markdown(const ExperimentResult& experiment, bool with_baselines,
                                       const std::string& label = "LProtector (this run)");

nlohmann::ordered_json ablation_report_json(const AblationReport& report, const RunManifest& manifest);

/// Markdown table `Variables | Accuracy | Precision | Recall | F1 Score`, one
/// row per cell in grid order.
std::string ablation_report_markdown(const AblationReport& report);

/// True when the cells share test set, store, provider, embedder, templates
/// and seed, and differ only in their rag/cot switches.
bool ablation_cells_comparable(const AblationReport& report);

}  // namespace lprotector
