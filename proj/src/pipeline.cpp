#include "lprotector/pipeline.hpp"

#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace lprotector {

std::string_view to_string(RerankMode mode) noexcept { return mode == RerankMode::Llm ? "llm" : "max_score"; }

std::string_view to_string(ContextMode mode) noexcept { return mode == ContextMode::Best ? "best" : "all"; }

void PipelineConfig::validate() const {
    if (top_k == 0) throw Error(Errc::InvalidConfig, "top_k must be at least 1");
    if (parallelism == 0) throw Error(Errc::InvalidConfig, "parallelism must be at least 1");
    if (rag_enabled && top_k > kMaxPromptEntries &&
        (rerank_mode == RerankMode::Llm || context_mode == ContextMode::All)) {
        throw Error(Errc::InvalidConfig,
                    "top_k above " + std::to_string(kMaxPromptEntries) + " cannot be shown to the model");
    }
}

nlohmann::ordered_json to_json(const PipelineConfig& config) {
    nlohmann::ordered_json doc;
    doc["rag_enabled"] = config.rag_enabled;
    doc["cot_enabled"] = config.cot_enabled;
    doc["top_k"] = config.top_k;
    doc["rerank_mode"] = to_string(config.rerank_mode);
    doc["context_mode"] = to_string(config.context_mode);
    doc["seed"] = config.seed;
    doc["fallback_label"] = PipelineConfig::kFallbackLabel;
    return doc;
}

namespace {

std::vector<RetrievedContext> to_contexts(const VectorStore& store, std::span<const RetrievalHit> hits) {
    std::vector<RetrievedContext> out;
    out.reserve(hits.size());
    for (const auto& hit : hits) {
        const auto* entry = store.find(hit.entry_id);
        out.push_back({*entry, hit.score});
    }
    return out;
}

Verdict classify(const PromptSpec& prompt, LlmProvider& llm) {
    auto response = llm.complete(prompt);
    try {
        return parse_verdict(response);
    } catch (const Error& e) {
        if (e.code() != Errc::ParseFailure) throw;
    }
    response = llm.complete(with_verdict_reminder(prompt));
    try {
        auto verdict = parse_verdict(response);
        verdict.retries_used = 1;
        return verdict;
    } catch (const Error& e) {
        if (e.code() != Errc::ParseFailure) throw;
    }
    return Verdict{PipelineConfig::kFallbackLabel, std::move(response), ParseStatus::Fallback, 1};
}

}  // namespace

SampleResult detect(std::string_view code, const VectorStore& store, const PipelineConfig& config,
                    Providers& providers, std::string sample_id, std::optional<int> true_label) {
    config.validate();
    if (is_blank(code)) throw Error(Errc::EmptyCode, "sample '" + sample_id + "' has blank code");
    if (config.rag_enabled && store.empty()) {
        throw Error(Errc::EmptyStore, "retrieval is enabled but the knowledge base is empty");
    }
    const auto start = std::chrono::steady_clock::now();

    SampleResult result;
    result.sample_id = std::move(sample_id);
    result.true_label = true_label;

    std::vector<RetrievedContext> context;
    if (config.rag_enabled) {
        const auto query = providers.embedder.embed(code);
        auto hits = store.top_k(query, config.top_k);
        auto candidates = to_contexts(store, hits);
        if (config.context_mode == ContextMode::All) {
            context = std::move(candidates);
        } else {
            std::size_t chosen = 0;
            if (config.rerank_mode == RerankMode::Llm && candidates.size() > 1) {
                const auto rerank = build_rerank_prompt(code, candidates, providers.templates);
                const auto response = providers.llm.complete(rerank);
                try {
                    chosen = parse_choice(response, candidates.size()) - 1;
                } catch (const Error& e) {
                    if (e.code() != Errc::ParseFailure && e.code() != Errc::OutOfRange) throw;
                    result.rerank_fallback = true;
                }
            }
            result.chosen_context = candidates[chosen].entry.id;
            context.push_back(std::move(candidates[chosen]));
        }
        result.retrieval = std::move(hits);
    }

    const auto prompt = build_classification_prompt(code, context, config.cot_enabled, providers.templates);
    const auto verdict = classify(prompt, providers.llm);
    result.predicted_label = verdict.label;
    result.parse_status = verdict.parse_status;
    result.verdict_retries = verdict.retries_used;
    result.latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
    return result;
}

nlohmann::ordered_json to_json(const ExperimentMetadata& metadata) {
    nlohmann::ordered_json doc;
    doc["config"] = to_json(metadata.config);
    doc["template_hashes"] = metadata.template_hashes;
    doc["provider"] = {{"kind", metadata.provider_kind}, {"model", metadata.provider_model}};
    doc["embedder"] = metadata.embedder;
    doc["store"] = {{"checksum", metadata.store_checksum}, {"size", metadata.store_size}};
    doc["test_set"] = {{"digest", metadata.test_set_digest}, {"size", metadata.test_set_size}};
    return doc;
}

std::string test_set_digest(std::span<const CodeSample> test_set) {
    std::vector<std::string> keys;
    keys.reserve(test_set.size());
    for (const auto& s : test_set) keys.push_back(s.id + ":" + std::to_string(s.label));
    std::sort(keys.begin(), keys.end());
    std::string canonical;
    for (const auto& k : keys) canonical += k + "\n";
    return sha256_hex(canonical);
}

namespace {

class Journal {
public:
    Journal(const std::filesystem::path& path, const std::string& run_digest) : path_(path) {
        std::ifstream in(path);
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);) {
            if (!is_blank(line)) lines.push_back(std::move(line));
        }
        if (lines.empty()) {
            nlohmann::ordered_json header;
            header["journal"] = 1;
            header["run_digest"] = run_digest;
            out_.open(path, std::ios::trunc | std::ios::binary);
            out_ << header.dump() << '\n' << std::flush;
        } else {
            const auto header = nlohmann::json::parse(lines.front(), nullptr, false);
            if (header.is_discarded() || !header.contains("run_digest") ||
                header.at("run_digest") != run_digest) {
                throw Error(Errc::InvalidConfig,
                            "journal " + path.string() + " belongs to a different run; remove it or change the path");
            }
            for (std::size_t i = 1; i < lines.size(); ++i) {
                const auto doc = nlohmann::json::parse(lines[i], nullptr, false);
                if (doc.is_discarded()) {
                    // An interrupted write can only damage the last line.
                    if (i + 1 == lines.size()) break;
                    throw Error(Errc::CorruptFile, "journal " + path.string() + " line " + std::to_string(i + 1));
                }
                auto result = sample_result_from_json(doc);
                completed_.insert_or_assign(result.sample_id, std::move(result));
            }
            out_.open(path, std::ios::app | std::ios::binary);
        }
        if (!out_) throw Error(Errc::InvalidInput, "cannot write journal " + path.string());
    }

    const std::unordered_map<std::string, SampleResult>& completed() const { return completed_; }

    void append(const SampleResult& result) {
        std::lock_guard lock(mutex_);
        out_ << to_json(result).dump() << '\n' << std::flush;
    }

private:
    std::filesystem::path path_;
    std::unordered_map<std::string, SampleResult> completed_;
    std::mutex mutex_;
    std::ofstream out_;
};

}  // namespace

ExperimentResult run_experiment(std::span<const CodeSample> test_set, const VectorStore& store,
                                const PipelineConfig& config, Providers& providers,
                                const ExperimentOptions& options) {
    config.validate();
    if (test_set.empty()) throw Error(Errc::EmptyTestSet, "the test set is empty");
    {
        std::unordered_set<std::string_view> ids;
        for (const auto& s : test_set) {
            if (!ids.insert(s.id).second) throw Error(Errc::DuplicateId, "test sample '" + s.id + "' repeats");
        }
    }

    ExperimentResult experiment;
    auto& meta = experiment.metadata;
    meta.config = config;
    meta.template_hashes = providers.templates.hashes();
    meta.provider_kind = std::string(to_string(providers.llm.kind()));
    meta.provider_model = providers.llm.model();
    meta.embedder = providers.embedder.fingerprint();
    meta.store_checksum = hex64(store.checksum());
    meta.store_size = store.size();
    meta.test_set_digest = test_set_digest(test_set);
    meta.test_set_size = test_set.size();

    std::optional<Journal> journal;
    if (options.journal) journal.emplace(*options.journal, sha256_hex(to_json(meta).dump()));

    std::vector<std::optional<SampleResult>> slots(test_set.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        if (journal) {
            auto it = journal->completed().find(test_set[i].id);
            if (it != journal->completed().end()) {
                slots[i] = it->second;
                ++experiment.resumed;
                continue;
            }
        }
        pending.push_back(i);
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        while (!failed.load()) {
            const auto n = next.fetch_add(1);
            if (n >= pending.size()) return;
            const auto& sample = test_set[pending[n]];
            try {
                auto result = detect(sample.code, store, config, providers, sample.id, sample.label);
                if (journal) journal->append(result);
                slots[pending[n]] = std::move(result);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                failed = true;
            }
        }
    };

    const auto workers = std::min(config.parallelism, std::max<std::size_t>(1, pending.size()));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> threads;
        threads.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) threads.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    experiment.results.reserve(slots.size());
    for (auto& slot : slots) experiment.results.push_back(std::move(*slot));
    std::sort(experiment.results.begin(), experiment.results.end(),
              [](const SampleResult& a, const SampleResult& b) { return a.sample_id < b.sample_id; });
    experiment.metrics = evaluate_results(experiment.results);
    return experiment;
}

AblationReport run_ablation_grid(std::span<const CodeSample> test_set, const VectorStore& store,
                                 const PipelineConfig& base, Providers& providers,
                                 const ExperimentOptions& options) {
    struct Cell {
        const char* name;
        const char* slug;
        bool rag;
        bool cot;
    };
    static constexpr Cell kCells[] = {
        {"RAG + CoT", "rag_cot", true, true},
        {"No RAG", "no_rag", false, true},
        {"No CoT", "no_cot", true, false},
        {"No RAG & CoT", "no_rag_cot", false, false},
    };
    AblationReport report;
    for (const auto& cell : kCells) {
        auto config = base;
        config.rag_enabled = cell.rag;
        config.cot_enabled = cell.cot;
        ExperimentOptions cell_options;
        if (options.journal) {
            auto path = *options.journal;
            path += std::string(".") + cell.slug;
            cell_options.journal = std::move(path);
        }
        report.cells.push_back({cell.name, run_experiment(test_set, store, config, providers, cell_options)});
    }
    return report;
}

}  // namespace lprotector
