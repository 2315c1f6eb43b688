#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "lprotector/corpus.hpp"
#include "lprotector/embed.hpp"
#include "lprotector/llm.hpp"
#include "lprotector/metrics.hpp"
#include "lprotector/prompt.hpp"
#include "lprotector/result.hpp"
#include "lprotector/vstore.hpp"

namespace lprotector {

enum class RerankMode { Llm, MaxScore };
/// Best injects the single reranked entry; All injects every retrieved hit
/// and skips reranking.
enum class ContextMode { Best, All };

std::string_view to_string(RerankMode mode) noexcept;
std::string_view to_string(ContextMode mode) noexcept;

struct PipelineConfig {
    bool rag_enabled = true;
    bool cot_enabled = true;
    std::size_t top_k = 5;
    RerankMode rerank_mode = RerankMode::Llm;
    ContextMode context_mode = ContextMode::Best;
    std::size_t parallelism = 1;
    std::uint64_t seed = 0;

    /// Label assigned when no parseable verdict is obtained.
    static constexpr int kFallbackLabel = 0;

    /// Throws Error{InvalidConfig}.
    void validate() const;
};

nlohmann::ordered_json to_json(const PipelineConfig& config);

/// The external collaborators of one run. All of them are shared between
/// worker threads.
struct Providers {
    Embedder& embedder;
    LlmProvider& llm;
    const TemplateSet& templates = TemplateSet::builtin();
};

/// Classifies one snippet: embed, retrieve top-k, rerank to one entry, build
/// the prompt, complete, parse. An unparseable verdict is re-asked once with a
/// format reminder, then falls back to label 0. The query embedding is never
/// added to the store.
///
/// Throws Error{EmptyCode}, Error{EmptyStore} (RAG on, empty store), and
/// provider errors.
SampleResult detect(std::string_view code, const VectorStore& store, const PipelineConfig& config,
                    Providers& providers, std::string sample_id = "snippet",
                    std::optional<int> true_label = std::nullopt);

/// Everything that identifies an experiment apart from wall-clock time.
struct ExperimentMetadata {
    PipelineConfig config;
    std::map<std::string, std::string> template_hashes;
    std::string provider_kind;
    std::string provider_model;
    std::string embedder;
    std::string store_checksum;
    std::size_t store_size = 0;
    std::string test_set_digest;
    std::size_t test_set_size = 0;
};

nlohmann::ordered_json to_json(const ExperimentMetadata& metadata);

struct ExperimentResult {
    ExperimentMetadata metadata;
    /// Sorted by sample id.
    std::vector<SampleResult> results;
    MetricsReport metrics;
    /// Results taken from an existing journal instead of being recomputed.
    std::size_t resumed = 0;
};

struct ExperimentOptions {
    /// Append-only JSON-lines journal: a header line, then one SampleResult per
    /// finished sample. If it already exists and its header matches this run,
    /// journaled samples are not classified again.
    std::optional<std::filesystem::path> journal;
};

/// Classifies every test sample exactly once with up to config.parallelism
/// concurrent detect calls. On a provider failure the run stops and the
/// journal keeps what finished.
///
/// Throws Error{EmptyTestSet}, Error{InvalidConfig} (journal from a different
/// run), and provider errors.
ExperimentResult run_experiment(std::span<const CodeSample> test_set, const VectorStore& store,
                                const PipelineConfig& config, Providers& providers,
                                const ExperimentOptions& options = {});

/// SHA-256 over the sorted "id:label" list of a test set.
std::string test_set_digest(std::span<const CodeSample> test_set);

struct AblationCell {
    std::string name;
    ExperimentResult experiment;
};

struct AblationReport {
    /// In order: RAG + CoT, No RAG, No CoT, No RAG & CoT.
    std::vector<AblationCell> cells;
};

/// The four (rag, cot) cells on one test set. Only rag_enabled/cot_enabled
/// differ between cells. With a journal option, cell i journals to
/// "<journal>.<slug>".
AblationReport run_ablation_grid(std::span<const CodeSample> test_set, const VectorStore& store,
                                 const PipelineConfig& base, Providers& providers,
                                 const ExperimentOptions& options = {});

}  // namespace lprotector
