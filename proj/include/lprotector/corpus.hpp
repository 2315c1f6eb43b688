#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lprotector {

enum class Split { Unassigned, Test, KnowledgeBase };

std::string_view to_string(Split split) noexcept;

/// One labeled function from a Big-Vul style dataset. label 1 = vulnerable.
struct CodeSample {
    std::string id;
    std::string code;
    int label = 0;
    std::optional<std::string> cwe_id;
    std::optional<std::string> vuln_name;
    std::optional<std::string> description;
    Split split = Split::Unassigned;

    bool operator==(const CodeSample&) const = default;
};

/// Which header names hold which sample field. `code` and `label` must exist,
/// and so must `id` when set; otherwise the 1-based data row number becomes
/// the id ("row-<n>"). Metadata columns missing from the header leave the
/// field empty and are listed in IngestSummary::missing_metadata_columns.
struct ColumnMap {
    std::string code = "func_before";
    std::string label = "vul";
    std::optional<std::string> id;
    std::optional<std::string> cwe_id = "CWE ID";
    std::optional<std::string> vuln_name = "Vulnerability Classification";
    std::optional<std::string> description = "Summary";

    /// Column names of the published Big-Vul CSV (the defaults).
    static ColumnMap big_vul() { return {}; }

    bool operator==(const ColumnMap&) const = default;
};

struct IngestSummary {
    std::size_t rows = 0;
    std::size_t accepted = 0;
    std::size_t skipped_empty_code = 0;
    std::size_t skipped_bad_label = 0;
    std::size_t skipped_malformed = 0;
    std::vector<std::string> missing_metadata_columns;

    std::size_t skipped() const noexcept { return skipped_empty_code + skipped_bad_label + skipped_malformed; }
    bool operator==(const IngestSummary&) const = default;
};

struct IngestResult {
    std::vector<CodeSample> samples;
    IngestSummary summary;
};

/// Reads a delimiter-separated file with a header row. Rows with blank code,
/// a label other than 0/1, or too few fields are skipped and counted; the
/// remaining rows keep file order with split = Unassigned.
///
/// Throws Error{MissingFile | MissingColumn | EmptyCorpus | DuplicateId}.
IngestResult ingest(const std::filesystem::path& path, const ColumnMap& columns, char delimiter = ',');

struct CorpusStats {
    std::size_t total = 0;
    std::size_t vul = 0;
    std::size_t non_vul = 0;
    double vul_ratio = 0.0;

    bool operator==(const CorpusStats&) const = default;
};

CorpusStats corpus_stats(std::span<const CodeSample> samples);

/// Draws n_total / 2 samples of each label uniformly without replacement
/// (partial Fisher-Yates per label, mt19937_64 seeded with `seed`). The result
/// keeps corpus order and every sample is marked Split::Test.
///
/// Throws InsufficientClassError, or Error{InvalidInput} for odd n_total.
std::vector<CodeSample> balanced_sample(std::span<const CodeSample> samples, std::size_t n_total,
                                        std::uint64_t seed);

struct KnowledgeBaseSelection {
    std::vector<CodeSample> samples;
    std::size_t requested = 0;
    std::size_t available = 0;
    std::optional<std::string> warning;
};

/// Picks min(k, available) vulnerable samples whose ids are not in `test_set`.
/// Selected samples are marked Split::KnowledgeBase and keep corpus order.
/// Asking for more than exist is not an error; `warning` says so.
///
/// Throws Error{NoVulnerableSamples} or Error{InvalidInput} for k == 0.
KnowledgeBaseSelection select_knowledge_base(std::span<const CodeSample> samples,
                                             std::span<const CodeSample> test_set, std::size_t k,
                                             std::uint64_t seed);

/// Sampling parameters and the resulting id lists.
struct SplitRecord {
    std::uint64_t seed = 0;
    std::size_t n_test = 0;
    std::size_t kb_requested = 0;
    std::vector<std::string> test_ids;
    std::vector<std::string> knowledge_base_ids;
    std::vector<std::string> warnings;

    bool operator==(const SplitRecord&) const = default;
};

/// The corpus manifest: where the data came from, how it was read, what was
/// skipped, and (after a split) which ids went where. Other commands rebuild
/// the splits from it via resolve_splits.
struct CorpusManifest {
    std::string dataset_path;
    std::string dataset_sha256;
    char delimiter = ',';
    ColumnMap columns;
    IngestSummary ingest;
    CorpusStats stats;
    std::optional<SplitRecord> split;

    bool operator==(const CorpusManifest&) const = default;
};

CorpusManifest make_manifest(const std::filesystem::path& dataset, const ColumnMap& columns, char delimiter,
                             const IngestResult& result);

/// Runs balanced_sample then select_knowledge_base and records both.
void assign_splits(CorpusManifest& manifest, std::span<const CodeSample> samples, std::size_t n_test,
                   std::size_t kb_size, std::uint64_t seed);

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest);
/// Throws Error{CorruptFile} on schema problems.
CorpusManifest manifest_from_json(const nlohmann::json& doc);

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);
CorpusManifest load_manifest(const std::filesystem::path& path);

struct ResolvedSplits {
    std::vector<CodeSample> test;
    std::vector<CodeSample> knowledge_base;
};

/// Re-reads the dataset named by the manifest, checks its SHA-256, and returns
/// the test and knowledge-base samples in manifest order.
///
/// Throws Error{InvalidInput} when the manifest has no split or the dataset
/// no longer matches it.
ResolvedSplits resolve_splits(const CorpusManifest& manifest);

}  // namespace lprotector
