#include "lprotector/cli.hpp"

#include "lprotector/corpus.hpp"
#include "lprotector/embed.hpp"
#include "lprotector/error.hpp"
#include "lprotector/llm.hpp"
#include "lprotector/pipeline.hpp"
#include "lprotector/report.hpp"
#include "lprotector/support.hpp"
#include "lprotector/synthetic.hpp"
#include "lprotector/vstore.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

namespace lprotector::cli {

namespace {

struct ProviderOptions {
    std::string kind = "remote";
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    int max_retries = 3;
    int timeout_ms = 60000;
    double requests_per_second = 5.0;
    std::string script;
    std::string script_default;
    double threshold = ProviderConfig{}.heuristic_threshold;

    ProviderConfig to_config() const {
        ProviderConfig config;
        if (kind == "remote") {
            config.kind = ProviderKind::Remote;
        } else if (kind == "scripted") {
            config.kind = ProviderKind::Scripted;
        } else {
            config.kind = ProviderKind::Heuristic;
        }
        if (!endpoint.empty()) config.endpoint = endpoint;
        if (!model.empty()) config.model_id = model;
        config.temperature = temperature;
        config.max_retries = max_retries;
        config.timeout = std::chrono::milliseconds(timeout_ms);
        config.requests_per_second = requests_per_second;
        config.burst = std::max(1.0, requests_per_second);
        if (!script.empty()) config.script_path = script;
        config.script_default = script_default;
        config.heuristic_threshold = threshold;
        return config;
    }
};

struct EmbedderOptions {
    std::string kind = "hashed_local";
    std::size_t dim = 256;
    std::string normalization = "l2";
    std::string model;
    std::string endpoint;
    std::size_t max_chars = 24000;

    EmbedderConfig to_config(const std::filesystem::path& store_path) const {
        EmbedderConfig config;
        config.kind = kind == "remote" ? EmbedderKind::Remote : EmbedderKind::HashedLocal;
        config.dim = dim;
        config.normalization = normalization == "none" ? Normalization::None : Normalization::L2;
        if (!model.empty()) config.model_id = model;
        if (!endpoint.empty()) config.endpoint = endpoint;
        config.max_chars = max_chars;
        if (config.kind == EmbedderKind::Remote && !store_path.empty()) {
            auto cache = store_path;
            cache += ".embcache.jsonl";
            config.cache_path = cache;
        }
        return config;
    }
};

struct PipelineOptions {
    bool rag = true;
    bool cot = true;
    std::size_t top_k = 5;
    std::string rerank = "llm";
    std::string context = "best";
    std::size_t parallelism = 1;
    std::uint64_t seed = 0;
    std::string templates;

    PipelineConfig to_config() const {
        PipelineConfig config;
        config.rag_enabled = rag;
        config.cot_enabled = cot;
        config.top_k = top_k;
        config.rerank_mode = rerank == "max_score" ? RerankMode::MaxScore : RerankMode::Llm;
        config.context_mode = context == "all" ? ContextMode::All : ContextMode::Best;
        config.parallelism = parallelism;
        config.seed = seed;
        return config;
    }

    TemplateSet load_templates() const {
        return templates.empty() ? TemplateSet::builtin() : TemplateSet::load(templates);
    }
};

void add_config_option(CLI::App* app) {
    app->add_option("--config", "TOML file of 'option-name = value' lines; command-line flags win");
}

// CLI11 only reads the top-level app's config file, so a subcommand's file is
// expanded into --key=value arguments placed ahead of the user's own.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (!path || rest.size() < 2) return args;
    std::ifstream in(*path);
    if (!in) throw Error(Errc::MissingFile, "config file not found: " + *path);
    std::vector<std::string> injected;
    for (const auto& item : CLI::ConfigTOML().from_config(in)) {
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == rest[1])) {
            throw Error(Errc::InvalidConfig, "unexpected section in " + *path + ": " + item.fullname());
        }
        if (item.name == "++" || item.name == "--") continue;
        std::string value;
        for (const auto& input : item.inputs) value += (value.empty() ? "" : ",") + input;
        injected.push_back("--" + item.name + "=" + value);
    }
    rest.insert(rest.begin() + 2, injected.begin(), injected.end());
    return rest;
}

void add_provider_options(CLI::App* app, ProviderOptions& o) {
    app->add_option("--provider", o.kind, "LLM provider")
        ->check(CLI::IsMember({"remote", "scripted", "heuristic"}))
        ->capture_default_str();
    app->add_option("--endpoint", o.endpoint, "Chat-completion endpoint URL")->envname("LPROTECTOR_ENDPOINT");
    app->add_option("--model", o.model, "Chat model id")->envname("LPROTECTOR_MODEL");
    app->add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
    app->add_option("--max-retries", o.max_retries, "Retries on transient failures")->capture_default_str();
    app->add_option("--timeout-ms", o.timeout_ms, "Per-request timeout")->capture_default_str();
    app->add_option("--rate-limit", o.requests_per_second, "Remote requests per second")->capture_default_str();
    app->add_option("--script", o.script, "Scripted provider file: JSON {prompt_sha256: response}");
    app->add_option("--script-default", o.script_default, "Scripted provider answer for unknown prompts");
    app->add_option("--heuristic-threshold", o.threshold, "Heuristic provider similarity threshold")
        ->capture_default_str();
}

void add_embedder_options(CLI::App* app, EmbedderOptions& o) {
    app->add_option("--embedder", o.kind, "Embedding provider")
        ->check(CLI::IsMember({"hashed_local", "remote"}))
        ->capture_default_str();
    app->add_option("--embedding-dim", o.dim, "Embedding dimension")->capture_default_str();
    app->add_option("--normalization", o.normalization, "Embedding normalization")
        ->check(CLI::IsMember({"l2", "none"}))
        ->capture_default_str();
    app->add_option("--embedding-model", o.model, "Remote embedding model id")->envname("LPROTECTOR_EMBEDDING_MODEL");
    app->add_option("--embedding-endpoint", o.endpoint, "Remote embedding endpoint URL")
        ->envname("LPROTECTOR_EMBEDDING_ENDPOINT");
    app->add_option("--max-chars", o.max_chars, "Remote embedding character budget")->capture_default_str();
}

void add_pipeline_options(CLI::App* app, PipelineOptions& o, bool with_rag_cot) {
    if (with_rag_cot) {
        app->add_flag("--rag,!--no-rag", o.rag, "Retrieve knowledge-base context (default on)");
        app->add_flag("--cot,!--no-cot", o.cot, "Chain-of-thought prompt (default on)");
    }
    app->add_option("--top-k", o.top_k, "Entries retrieved per query")->capture_default_str();
    app->add_option("--rerank", o.rerank, "How the context entry is chosen")
        ->check(CLI::IsMember({"llm", "max_score"}))
        ->capture_default_str();
    app->add_option("--context", o.context, "Inject the best entry or all retrieved entries")
        ->check(CLI::IsMember({"best", "all"}))
        ->capture_default_str();
    app->add_option("--seed", o.seed, "Run seed recorded in reports")->capture_default_str();
    app->add_option("--templates", o.templates, "Directory of prompt templates (default: built in)");
}

std::string with_commas(std::size_t value) {
    auto digits = std::to_string(value);
    for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(static_cast<std::size_t>(i), ",");
    return digits;
}

std::string percent_of(std::size_t part, std::size_t total) {
    return total == 0 ? "0.00" : format_percent(static_cast<double>(part) / static_cast<double>(total));
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

std::filesystem::path with_suffix(const std::string& prefix, const char* suffix) {
    return std::filesystem::path(prefix + suffix);
}

void print_stats(std::ostream& out, const std::string& name, const CorpusStats& stats) {
    out << "| Dataset | Samples | Vul | Non-Vul |\n|---|---:|---:|---:|\n";
    out << "| " << name << " | " << with_commas(stats.total) << " | " << with_commas(stats.vul) << " ("
        << percent_of(stats.vul, stats.total) << "%) | " << with_commas(stats.non_vul) << " ("
        << percent_of(stats.non_vul, stats.total) << "%) |\n";
}

nlohmann::ordered_json provider_snapshot(const ProviderConfig& config, const LlmProvider& provider) {
    nlohmann::ordered_json doc;
    doc["kind"] = to_string(config.kind);
    doc["model"] = provider.model();
    doc["temperature"] = config.temperature;
    doc["max_retries"] = config.max_retries;
    if (config.kind == ProviderKind::Heuristic) doc["heuristic_threshold"] = config.heuristic_threshold;
    if (config.kind == ProviderKind::Remote) doc["endpoint"] = config.endpoint.value_or("");
    return doc;
}

nlohmann::ordered_json embedder_snapshot(const EmbedderConfig& config, const Embedder& embedder) {
    nlohmann::ordered_json doc;
    doc["kind"] = to_string(config.kind);
    doc["fingerprint"] = embedder.fingerprint();
    return doc;
}

// Everything evaluate/ablate need, loaded once.
struct RunInputs {
    CorpusManifest manifest;
    ResolvedSplits splits;
    VectorStore store;
    EmbedderConfig embedder_config;
    std::unique_ptr<Embedder> embedder;
    ProviderConfig provider_config;
    std::unique_ptr<LlmProvider> provider;
    TemplateSet templates;
    PipelineConfig pipeline;
    RunManifest run_manifest;
};

RunInputs load_run_inputs(const std::string& command, const std::string& manifest_path, const std::string& store_path,
                          const EmbedderOptions& embedder_options, const ProviderOptions& provider_options,
                          const PipelineOptions& pipeline_options) {
    RunInputs in;
    in.manifest = load_manifest(manifest_path);
    in.splits = resolve_splits(in.manifest);
    if (in.splits.test.empty()) throw Error(Errc::EmptyTestSet, "the manifest's test split is empty");
    in.store = store_path.empty() ? VectorStore{} : VectorStore::load(store_path);
    in.embedder_config = embedder_options.to_config(store_path);
    in.embedder = make_embedder(in.embedder_config);
    if (!in.store.empty() && in.store.dim() != in.embedder->dim()) {
        throw Error(Errc::DimensionMismatch, "store dim " + std::to_string(in.store.dim()) +
                                                 " differs from embedder dim " + std::to_string(in.embedder->dim()));
    }
    in.provider_config = provider_options.to_config();
    in.provider = make_provider(in.provider_config);
    in.templates = pipeline_options.load_templates();
    in.pipeline = pipeline_options.to_config();

    auto& rm = in.run_manifest;
    rm.command = command;
    rm.config["pipeline"] = to_json(in.pipeline);
    rm.config["provider"] = provider_snapshot(in.provider_config, *in.provider);
    rm.config["embedder"] = embedder_snapshot(in.embedder_config, *in.embedder);
    rm.seeds["split"] = in.manifest.split->seed;
    rm.seeds["pipeline"] = in.pipeline.seed;
    rm.template_hashes = in.templates.hashes();
    rm.provider_kind = std::string(to_string(in.provider_config.kind));
    rm.provider_model = in.provider->model();
    rm.input_checksums["corpus_manifest"] = sha256_file(manifest_path);
    rm.input_checksums["dataset"] = in.manifest.dataset_sha256;
    if (!store_path.empty()) rm.input_checksums["store"] = sha256_file(store_path);
    return in;
}

void write_timing(const std::filesystem::path& path, const std::string& started, double seconds) {
    nlohmann::ordered_json doc;
    doc["started_at"] = started;
    doc["finished_at"] = utc_now();
    doc["wall_seconds"] = seconds;
    write_file(path, doc.dump(2) + "\n");
}

int handle_error(const Error& e, std::ostream& err) {
    err << "error: " << e.what() << "\n";
    return is_transport_error(e.code()) ? kExitProvider : kExitInput;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Retrieval-augmented LLM vulnerability detection for C/C++ functions", "lprotector"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // ingest
    std::string dataset;
    std::string manifest_out;
    std::string delimiter = ",";
    ColumnMap columns;
    std::string id_column;
    std::string cwe_column = *columns.cwe_id;
    std::string name_column = *columns.vuln_name;
    std::string description_column = *columns.description;
    auto* ingest_cmd = app.add_subcommand("ingest", "Read a dataset and write a corpus manifest");
    add_config_option(ingest_cmd);
    ingest_cmd->add_option("dataset", dataset, "Delimiter-separated dataset with a header row")->required();
    ingest_cmd->add_option("--out", manifest_out, "Corpus manifest to write")->required();
    ingest_cmd->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    ingest_cmd->add_option("--code-column", columns.code, "Column holding the function source")->capture_default_str();
    ingest_cmd->add_option("--label-column", columns.label, "Column holding the 0/1 label")->capture_default_str();
    ingest_cmd->add_option("--id-column", id_column, "Column holding sample ids (default: row numbers)");
    ingest_cmd->add_option("--cwe-column", cwe_column, "CWE id column ('' to skip)")->capture_default_str();
    ingest_cmd->add_option("--name-column", name_column, "Vulnerability name column ('' to skip)")
        ->capture_default_str();
    ingest_cmd->add_option("--description-column", description_column, "Description column ('' to skip)")
        ->capture_default_str();

    // split
    std::string split_manifest;
    std::size_t n_test = 5000;
    std::size_t kb_size = 500;
    std::uint64_t split_seed = 0;
    auto* split_cmd = app.add_subcommand("split", "Draw the balanced test set and the knowledge-base samples");
    add_config_option(split_cmd);
    split_cmd->add_option("manifest", split_manifest, "Corpus manifest (updated in place)")->required();
    split_cmd->add_option("--n-test", n_test, "Test-set size (even)")->capture_default_str();
    split_cmd->add_option("--kb-size", kb_size, "Knowledge-base size")->capture_default_str();
    split_cmd->add_option("--seed", split_seed, "Sampling seed")->capture_default_str();

    // index
    std::string index_manifest;
    std::string index_store;
    EmbedderOptions index_embedder;
    auto* index_cmd = app.add_subcommand("index", "Embed the knowledge-base samples into a vector-store file");
    add_config_option(index_cmd);
    index_cmd->add_option("manifest", index_manifest, "Corpus manifest with a split")->required();
    index_cmd->add_option("--store", index_store, "Vector-store file to write")->required();
    add_embedder_options(index_cmd, index_embedder);

    // detect
    std::string snippet_path;
    std::string detect_store;
    EmbedderOptions detect_embedder;
    ProviderOptions detect_provider;
    PipelineOptions detect_pipeline;
    auto* detect_cmd = app.add_subcommand("detect", "Classify one source file");
    add_config_option(detect_cmd);
    detect_cmd->add_option("snippet", snippet_path, "File holding the function to classify")->required();
    detect_cmd->add_option("--store", detect_store, "Vector-store file (required with --rag)");
    add_embedder_options(detect_cmd, detect_embedder);
    add_provider_options(detect_cmd, detect_provider);
    add_pipeline_options(detect_cmd, detect_pipeline, true);

    // evaluate
    std::string eval_manifest;
    std::string eval_store;
    std::string eval_out;
    std::string eval_journal;
    bool with_baselines = false;
    EmbedderOptions eval_embedder;
    ProviderOptions eval_provider;
    PipelineOptions eval_pipeline;
    auto* eval_cmd = app.add_subcommand("evaluate", "Classify the test split and report metrics");
    add_config_option(eval_cmd);
    eval_cmd->add_option("manifest", eval_manifest, "Corpus manifest with a split")->required();
    eval_cmd->add_option("--store", eval_store, "Vector-store file (required with --rag)");
    eval_cmd->add_option("--out", eval_out, "Report path prefix: writes <out>.json and <out>.md")->required();
    eval_cmd->add_option("--journal", eval_journal, "Results journal (default <out>.journal.jsonl)");
    eval_cmd->add_option("--parallelism", eval_pipeline.parallelism, "Concurrent detections")->capture_default_str();
    eval_cmd->add_flag("--with-baselines", with_baselines, "Add the published baseline rows to the report");
    add_embedder_options(eval_cmd, eval_embedder);
    add_provider_options(eval_cmd, eval_provider);
    add_pipeline_options(eval_cmd, eval_pipeline, true);

    // ablate
    std::string ablate_manifest;
    std::string ablate_store;
    std::string ablate_out;
    EmbedderOptions ablate_embedder;
    ProviderOptions ablate_provider;
    PipelineOptions ablate_pipeline;
    auto* ablate_cmd = app.add_subcommand("ablate", "Run the four RAG/CoT cells on the test split");
    add_config_option(ablate_cmd);
    ablate_cmd->add_option("manifest", ablate_manifest, "Corpus manifest with a split")->required();
    ablate_cmd->add_option("--store", ablate_store, "Vector-store file")->required();
    ablate_cmd->add_option("--out", ablate_out, "Report path prefix: writes <out>.json and <out>.md")->required();
    ablate_cmd->add_option("--parallelism", ablate_pipeline.parallelism, "Concurrent detections")
        ->capture_default_str();
    add_embedder_options(ablate_cmd, ablate_embedder);
    add_provider_options(ablate_cmd, ablate_provider);
    add_pipeline_options(ablate_cmd, ablate_pipeline, false);

    // synth
    std::string synth_out;
    std::size_t synth_vul = 200;
    std::size_t synth_clean = 200;
    std::uint64_t synth_seed = 0;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic corpus with planted vulnerable idioms");
    synth_cmd->add_option("--out", synth_out, "CSV file to write")->required();
    synth_cmd->add_option("--vulnerable", synth_vul, "Vulnerable functions")->capture_default_str();
    synth_cmd->add_option("--clean", synth_clean, "Clean functions")->capture_default_str();
    synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();

    std::vector<std::string> expanded;
    try {
        expanded = expand_config(args);
    } catch (const Error& e) {
        return handle_error(e, err);
    }
    try {
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        if (!reversed.empty()) reversed.pop_back();
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (ingest_cmd->parsed()) {
            if (delimiter.size() != 1) throw Error(Errc::InvalidConfig, "delimiter must be a single character");
            if (!id_column.empty()) columns.id = id_column;
            columns.cwe_id = cwe_column.empty() ? std::nullopt : std::optional<std::string>(cwe_column);
            columns.vuln_name = name_column.empty() ? std::nullopt : std::optional<std::string>(name_column);
            columns.description =
                description_column.empty() ? std::nullopt : std::optional<std::string>(description_column);
            const auto result = ingest(dataset, columns, delimiter.front());
            const auto manifest = make_manifest(dataset, columns, delimiter.front(), result);
            save_manifest(manifest, manifest_out);
            print_stats(out, std::filesystem::path(dataset).filename().string(), manifest.stats);
            out << "rows " << result.summary.rows << ", accepted " << result.summary.accepted << ", skipped "
                << result.summary.skipped() << " (empty code " << result.summary.skipped_empty_code
                << ", bad label " << result.summary.skipped_bad_label << ", malformed "
                << result.summary.skipped_malformed << ")\n";
            for (const auto& name : result.summary.missing_metadata_columns) {
                err << "warning: metadata column '" << name << "' not in header; field left empty\n";
            }
            out << "manifest written to " << manifest_out << "\n";
            return kExitOk;
        }

        if (split_cmd->parsed()) {
            auto manifest = load_manifest(split_manifest);
            const auto corpus = ingest(manifest.dataset_path, manifest.columns, manifest.delimiter);
            if (sha256_file(manifest.dataset_path) != manifest.dataset_sha256) {
                throw Error(Errc::InvalidInput, "dataset changed since ingest; re-run ingest");
            }
            assign_splits(manifest, corpus.samples, n_test, kb_size, split_seed);
            save_manifest(manifest, split_manifest);
            const auto& split = *manifest.split;
            out << "test set: " << split.test_ids.size() << " (" << split.test_ids.size() / 2 << " vulnerable, "
                << split.test_ids.size() / 2 << " non-vulnerable), seed " << split.seed << "\n";
            out << "knowledge base: " << split.knowledge_base_ids.size() << " vulnerable samples\n";
            for (const auto& warning : split.warnings) err << "warning: " << warning << "\n";
            return kExitOk;
        }

        if (index_cmd->parsed()) {
            const auto manifest = load_manifest(index_manifest);
            const auto splits = resolve_splits(manifest);
            const auto config = index_embedder.to_config(index_store);
            auto embedder = make_embedder(config);
            std::vector<KnowledgeEntry> entries;
            entries.reserve(splits.knowledge_base.size());
            std::size_t truncated = 0;
            for (const auto& sample : splits.knowledge_base) {
                auto embedded = embedder->embed_detailed(sample.code);
                if (embedded.truncated) ++truncated;
                entries.push_back(KnowledgeEntry{sample.id, sample.cwe_id, sample.vuln_name, sample.description,
                                                 sample.code, std::move(embedded.vector)});
            }
            if (entries.empty()) err << "warning: the knowledge base is empty; writing an empty store\n";
            if (truncated > 0) err << "warning: " << truncated << " samples were truncated before embedding\n";
            const auto store = VectorStore::build(std::move(entries), embedder->dim());
            store.save(index_store);
            const auto reloaded = VectorStore::load(index_store);
            if (!(reloaded == store)) throw Error(Errc::CorruptFile, "store did not survive a reload");
            out << "indexed " << store.size() << " entries, dim " << store.dim() << " -> " << index_store << "\n";
            return kExitOk;
        }

        if (detect_cmd->parsed()) {
            const auto code = read_file(snippet_path);
            VectorStore store;
            if (detect_pipeline.rag) {
                if (detect_store.empty()) throw Error(Errc::InvalidConfig, "--store is required with --rag");
                store = VectorStore::load(detect_store);
            }
            auto embedder = make_embedder(detect_embedder.to_config(detect_store));
            if (!store.empty() && store.dim() != embedder->dim()) {
                throw Error(Errc::DimensionMismatch, "store dim " + std::to_string(store.dim()) +
                                                         " differs from embedder dim " +
                                                         std::to_string(embedder->dim()));
            }
            auto provider = make_provider(detect_provider.to_config());
            const auto templates = detect_pipeline.load_templates();
            Providers providers{*embedder, *provider, templates};
            const auto result = detect(code, store, detect_pipeline.to_config(), providers,
                                       std::filesystem::path(snippet_path).filename().string());
            out << to_json(result).dump(2) << "\n";
            return kExitOk;
        }

        if (eval_cmd->parsed()) {
            const auto started = utc_now();
            const auto t0 = std::chrono::steady_clock::now();
            auto in = load_run_inputs("evaluate", eval_manifest, eval_store, eval_embedder, eval_provider,
                                      eval_pipeline);
            Providers providers{*in.embedder, *in.provider, in.templates};
            ExperimentOptions options;
            options.journal = eval_journal.empty() ? with_suffix(eval_out, ".journal.jsonl")
                                                   : std::filesystem::path(eval_journal);
            const auto experiment = run_experiment(in.splits.test, in.store, in.pipeline, providers, options);
            write_file(with_suffix(eval_out, ".json"),
                       experiment_report_json(experiment, in.run_manifest, with_baselines).dump(2) + "\n");
            const auto markdown = experiment_report_markdown(experiment, with_baselines);
            write_file(with_suffix(eval_out, ".md"), markdown);
            write_timing(with_suffix(eval_out, ".timing.json"), started,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            out << markdown;
            if (experiment.resumed > 0) out << "resumed " << experiment.resumed << " samples from the journal\n";
            return kExitOk;
        }

        if (ablate_cmd->parsed()) {
            const auto started = utc_now();
            const auto t0 = std::chrono::steady_clock::now();
            auto in = load_run_inputs("ablate", ablate_manifest, ablate_store, ablate_embedder, ablate_provider,
                                      ablate_pipeline);
            in.run_manifest.config["pipeline"].erase("rag_enabled");
            in.run_manifest.config["pipeline"].erase("cot_enabled");
            Providers providers{*in.embedder, *in.provider, in.templates};
            ExperimentOptions options;
            options.journal = with_suffix(ablate_out, ".journal.jsonl");
            const auto report = run_ablation_grid(in.splits.test, in.store, in.pipeline, providers, options);
            write_file(with_suffix(ablate_out, ".json"), ablation_report_json(report, in.run_manifest).dump(2) + "\n");
            const auto markdown = ablation_report_markdown(report);
            write_file(with_suffix(ablate_out, ".md"), markdown);
            write_timing(with_suffix(ablate_out, ".timing.json"), started,
                         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            out << markdown;
            return kExitOk;
        }

        if (synth_cmd->parsed()) {
            const auto samples = make_planted_corpus(synth_vul, synth_clean, synth_seed);
            write_corpus_csv(samples, synth_out);
            out << "wrote " << samples.size() << " samples (" << synth_vul << " vulnerable) to " << synth_out << "\n";
            return kExitOk;
        }
    } catch (const InsufficientClassError& e) {
        return handle_error(e, err);
    } catch (const Error& e) {
        return handle_error(e, err);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}

}  // namespace lprotector::cli
