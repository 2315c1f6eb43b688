#include "lprotector/corpus.hpp"

#include "lprotector/csv.hpp"
#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace lprotector {

std::string_view to_string(Split split) noexcept {
    switch (split) {
        case Split::Unassigned: return "unassigned";
        case Split::Test: return "test";
        case Split::KnowledgeBase: return "knowledge_base";
    }
    return "unassigned";
}

namespace {

std::size_t require_column(const std::unordered_map<std::string, std::size_t>& header, const std::string& name) {
    auto it = header.find(name);
    if (it == header.end()) {
        throw Error(Errc::MissingColumn, "column '" + name + "' not found in header");
    }
    return it->second;
}

// Metadata columns are best effort: a name absent from the header is noted
// and the field is left empty.
std::optional<std::size_t> metadata_column(const std::unordered_map<std::string, std::size_t>& header,
                                           const std::optional<std::string>& name,
                                           std::vector<std::string>& missing) {
    if (!name) return std::nullopt;
    auto it = header.find(*name);
    if (it == header.end()) {
        missing.push_back(*name);
        return std::nullopt;
    }
    return it->second;
}

std::optional<std::string> non_blank(const std::string& value) {
    if (is_blank(value)) return std::nullopt;
    return value;
}

std::optional<int> parse_label(std::string_view raw) {
    raw = trim(raw);
    if (raw == "0") return 0;
    if (raw == "1") return 1;
    return std::nullopt;
}

// Partial Fisher-Yates over `pool`; returns the first `need` positions after
// shuffling, i.e. a uniform sample without replacement.
std::vector<std::size_t> sample_without_replacement(std::vector<std::size_t> pool, std::size_t need,
                                                    std::mt19937_64& rng) {
    for (std::size_t i = 0; i < need; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_below(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(need);
    return pool;
}

}  // namespace

IngestResult ingest(const std::filesystem::path& path, const ColumnMap& columns, char delimiter) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::MissingFile, "cannot open dataset " + path.string());
    }
    DelimitedReader reader(in, delimiter);
    std::vector<std::string> fields;
    if (!reader.next(fields)) {
        throw Error(Errc::EmptyCorpus, path.string() + " has no header row");
    }
    if (!fields.empty() && fields.front().starts_with("\xEF\xBB\xBF")) {
        fields.front().erase(0, 3);
    }
    std::unordered_map<std::string, std::size_t> header;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        header.emplace(std::string(trim(fields[i])), i);
    }
    const auto code_col = require_column(header, columns.code);
    const auto label_col = require_column(header, columns.label);
    std::optional<std::size_t> id_col;
    if (columns.id) id_col = require_column(header, *columns.id);
    IngestResult result;
    auto& missing = result.summary.missing_metadata_columns;
    const auto cwe_col = metadata_column(header, columns.cwe_id, missing);
    const auto name_col = metadata_column(header, columns.vuln_name, missing);
    const auto desc_col = metadata_column(header, columns.description, missing);

    std::size_t needed = std::max(code_col, label_col);
    for (const auto& col : {id_col, cwe_col, name_col, desc_col}) {
        if (col) needed = std::max(needed, *col);
    }

    std::unordered_set<std::string> seen;
    while (reader.next(fields)) {
        // A lone trailing blank line is not a row.
        if (fields.size() == 1 && fields.front().empty()) continue;
        ++result.summary.rows;
        if (fields.size() <= needed) {
            ++result.summary.skipped_malformed;
            continue;
        }
        if (is_blank(fields[code_col])) {
            ++result.summary.skipped_empty_code;
            continue;
        }
        const auto label = parse_label(fields[label_col]);
        if (!label) {
            ++result.summary.skipped_bad_label;
            continue;
        }
        CodeSample sample;
        sample.id = id_col ? std::string(trim(fields[*id_col])) : "row-" + std::to_string(result.summary.rows);
        if (sample.id.empty()) {
            ++result.summary.skipped_malformed;
            continue;
        }
        if (!seen.insert(sample.id).second) {
            throw Error(Errc::DuplicateId, "id '" + sample.id + "' appears twice (line " +
                                               std::to_string(reader.record_line()) + ")");
        }
        sample.code = std::move(fields[code_col]);
        sample.label = *label;
        if (cwe_col) sample.cwe_id = non_blank(fields[*cwe_col]);
        if (name_col) sample.vuln_name = non_blank(fields[*name_col]);
        if (desc_col) sample.description = non_blank(fields[*desc_col]);
        result.samples.push_back(std::move(sample));
    }
    result.summary.accepted = result.samples.size();
    if (result.samples.empty()) {
        throw Error(Errc::EmptyCorpus, path.string() + " has no valid rows (" +
                                           std::to_string(result.summary.skipped()) + " skipped)");
    }
    return result;
}

CorpusStats corpus_stats(std::span<const CodeSample> samples) {
    CorpusStats stats;
    stats.total = samples.size();
    stats.vul = static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const CodeSample& s) { return s.label == 1; }));
    stats.non_vul = stats.total - stats.vul;
    stats.vul_ratio = stats.total == 0 ? 0.0 : static_cast<double>(stats.vul) / static_cast<double>(stats.total);
    return stats;
}

std::vector<CodeSample> balanced_sample(std::span<const CodeSample> samples, std::size_t n_total,
                                        std::uint64_t seed) {
    if (n_total % 2 != 0) {
        throw Error(Errc::InvalidInput, "balanced_sample needs an even n_total, got " + std::to_string(n_total));
    }
    const std::size_t per_class = n_total / 2;
    std::vector<std::size_t> vulnerable;
    std::vector<std::size_t> clean;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        (samples[i].label == 1 ? vulnerable : clean).push_back(i);
    }
    if (vulnerable.size() < per_class) throw InsufficientClassError(1, vulnerable.size(), per_class);
    if (clean.size() < per_class) throw InsufficientClassError(0, clean.size(), per_class);

    std::mt19937_64 rng(seed);
    auto picked = sample_without_replacement(std::move(vulnerable), per_class, rng);
    auto picked_clean = sample_without_replacement(std::move(clean), per_class, rng);
    picked.insert(picked.end(), picked_clean.begin(), picked_clean.end());
    std::sort(picked.begin(), picked.end());

    std::vector<CodeSample> out;
    out.reserve(picked.size());
    for (auto index : picked) {
        out.push_back(samples[index]);
        out.back().split = Split::Test;
    }
    return out;
}

KnowledgeBaseSelection select_knowledge_base(std::span<const CodeSample> samples,
                                             std::span<const CodeSample> test_set, std::size_t k,
                                             std::uint64_t seed) {
    if (k == 0) {
        throw Error(Errc::InvalidInput, "knowledge base size must be at least 1");
    }
    std::unordered_set<std::string_view> excluded;
    for (const auto& s : test_set) excluded.insert(s.id);

    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (samples[i].label == 1 && !excluded.contains(samples[i].id)) eligible.push_back(i);
    }
    if (eligible.empty()) {
        throw Error(Errc::NoVulnerableSamples, "no vulnerable samples outside the test set");
    }

    KnowledgeBaseSelection selection;
    selection.requested = k;
    selection.available = eligible.size();
    const std::size_t take = std::min(k, eligible.size());
    if (take < k) {
        selection.warning = "requested " + std::to_string(k) + " knowledge-base entries but only " +
                            std::to_string(eligible.size()) + " vulnerable non-test samples exist";
    }
    std::mt19937_64 rng(seed);
    auto picked = sample_without_replacement(std::move(eligible), take, rng);
    std::sort(picked.begin(), picked.end());
    selection.samples.reserve(picked.size());
    for (auto index : picked) {
        selection.samples.push_back(samples[index]);
        selection.samples.back().split = Split::KnowledgeBase;
    }
    return selection;
}

CorpusManifest make_manifest(const std::filesystem::path& dataset, const ColumnMap& columns, char delimiter,
                             const IngestResult& result) {
    CorpusManifest manifest;
    manifest.dataset_path = std::filesystem::absolute(dataset).lexically_normal().string();
    manifest.dataset_sha256 = sha256_file(dataset);
    manifest.delimiter = delimiter;
    manifest.columns = columns;
    manifest.ingest = result.summary;
    manifest.stats = corpus_stats(result.samples);
    return manifest;
}

void assign_splits(CorpusManifest& manifest, std::span<const CodeSample> samples, std::size_t n_test,
                   std::size_t kb_size, std::uint64_t seed) {
    SplitRecord record;
    record.seed = seed;
    record.n_test = n_test;
    record.kb_requested = kb_size;
    const auto test = balanced_sample(samples, n_test, seed);
    for (const auto& s : test) record.test_ids.push_back(s.id);
    if (kb_size > 0) {
        auto kb = select_knowledge_base(samples, test, kb_size, seed);
        for (const auto& s : kb.samples) record.knowledge_base_ids.push_back(s.id);
        if (kb.warning) record.warnings.push_back(*kb.warning);
    }
    manifest.split = std::move(record);
}

namespace {

nlohmann::json optional_json(const std::optional<std::string>& value) {
    return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

std::optional<std::string> optional_string(const nlohmann::json& doc, const char* key) {
    const auto& value = doc.at(key);
    if (value.is_null()) return std::nullopt;
    return value.get<std::string>();
}

}  // namespace

nlohmann::ordered_json manifest_to_json(const CorpusManifest& manifest) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["dataset"] = {
        {"path", manifest.dataset_path},
        {"sha256", manifest.dataset_sha256},
        {"delimiter", std::string(1, manifest.delimiter)},
        {"column_map",
         {{"code", manifest.columns.code},
          {"label", manifest.columns.label},
          {"id", optional_json(manifest.columns.id)},
          {"cwe_id", optional_json(manifest.columns.cwe_id)},
          {"vuln_name", optional_json(manifest.columns.vuln_name)},
          {"description", optional_json(manifest.columns.description)}}},
    };
    doc["ingest"] = {
        {"rows", manifest.ingest.rows},
        {"accepted", manifest.ingest.accepted},
        {"skipped_empty_code", manifest.ingest.skipped_empty_code},
        {"skipped_bad_label", manifest.ingest.skipped_bad_label},
        {"skipped_malformed", manifest.ingest.skipped_malformed},
        {"missing_metadata_columns", manifest.ingest.missing_metadata_columns},
    };
    doc["stats"] = {
        {"total", manifest.stats.total},
        {"vul", manifest.stats.vul},
        {"non_vul", manifest.stats.non_vul},
        {"vul_ratio", manifest.stats.vul_ratio},
    };
    if (manifest.split) {
        const auto& split = *manifest.split;
        doc["split"] = {
            {"seed", split.seed},
            {"n_test", split.n_test},
            {"kb_requested", split.kb_requested},
            {"test_count", split.test_ids.size()},
            {"knowledge_base_count", split.knowledge_base_ids.size()},
            {"test_ids", split.test_ids},
            {"knowledge_base_ids", split.knowledge_base_ids},
            {"warnings", split.warnings},
        };
    } else {
        doc["split"] = nullptr;
    }
    return doc;
}

CorpusManifest manifest_from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("version").get<int>() != 1) {
            throw Error(Errc::CorruptFile, "unsupported manifest version");
        }
        CorpusManifest manifest;
        const auto& dataset = doc.at("dataset");
        manifest.dataset_path = dataset.at("path").get<std::string>();
        manifest.dataset_sha256 = dataset.at("sha256").get<std::string>();
        const auto delimiter = dataset.at("delimiter").get<std::string>();
        if (delimiter.size() != 1) throw Error(Errc::CorruptFile, "delimiter must be one character");
        manifest.delimiter = delimiter.front();
        const auto& map = dataset.at("column_map");
        manifest.columns.code = map.at("code").get<std::string>();
        manifest.columns.label = map.at("label").get<std::string>();
        manifest.columns.id = optional_string(map, "id");
        manifest.columns.cwe_id = optional_string(map, "cwe_id");
        manifest.columns.vuln_name = optional_string(map, "vuln_name");
        manifest.columns.description = optional_string(map, "description");

        const auto& ingest_doc = doc.at("ingest");
        manifest.ingest.rows = ingest_doc.at("rows").get<std::size_t>();
        manifest.ingest.accepted = ingest_doc.at("accepted").get<std::size_t>();
        manifest.ingest.skipped_empty_code = ingest_doc.at("skipped_empty_code").get<std::size_t>();
        manifest.ingest.skipped_bad_label = ingest_doc.at("skipped_bad_label").get<std::size_t>();
        manifest.ingest.skipped_malformed = ingest_doc.at("skipped_malformed").get<std::size_t>();
        manifest.ingest.missing_metadata_columns =
            ingest_doc.value("missing_metadata_columns", std::vector<std::string>{});

        const auto& stats = doc.at("stats");
        manifest.stats.total = stats.at("total").get<std::size_t>();
        manifest.stats.vul = stats.at("vul").get<std::size_t>();
        manifest.stats.non_vul = stats.at("non_vul").get<std::size_t>();
        manifest.stats.vul_ratio = stats.at("vul_ratio").get<double>();

        const auto& split = doc.at("split");
        if (!split.is_null()) {
            SplitRecord record;
            record.seed = split.at("seed").get<std::uint64_t>();
            record.n_test = split.at("n_test").get<std::size_t>();
            record.kb_requested = split.at("kb_requested").get<std::size_t>();
            record.test_ids = split.at("test_ids").get<std::vector<std::string>>();
            record.knowledge_base_ids = split.at("knowledge_base_ids").get<std::vector<std::string>>();
            record.warnings = split.at("warnings").get<std::vector<std::string>>();
            manifest.split = std::move(record);
        }
        return manifest;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::CorruptFile, std::string("corpus manifest: ") + e.what());
    }
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
    write_file(path, manifest_to_json(manifest).dump(2) + "\n");
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
    const auto text = read_file(path);
    nlohmann::json doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        throw Error(Errc::CorruptFile, path.string() + " is not valid JSON");
    }
    return manifest_from_json(doc);
}

ResolvedSplits resolve_splits(const CorpusManifest& manifest) {
    if (!manifest.split) {
        throw Error(Errc::InvalidInput, "manifest has no split; run the split step first");
    }
    if (sha256_file(manifest.dataset_path) != manifest.dataset_sha256) {
        throw Error(Errc::InvalidInput, "dataset " + manifest.dataset_path + " changed since the manifest was written");
    }
    auto corpus = ingest(manifest.dataset_path, manifest.columns, manifest.delimiter);
    std::unordered_map<std::string_view, const CodeSample*> by_id;
    for (const auto& s : corpus.samples) by_id.emplace(s.id, &s);

    auto collect = [&](const std::vector<std::string>& ids, Split split) {
        std::vector<CodeSample> out;
        out.reserve(ids.size());
        for (const auto& id : ids) {
            auto it = by_id.find(id);
            if (it == by_id.end()) {
                throw Error(Errc::InvalidInput, "manifest id '" + id + "' not found in dataset");
            }
            out.push_back(*it->second);
            out.back().split = split;
        }
        return out;
    };
    ResolvedSplits splits;
    splits.test = collect(manifest.split->test_ids, Split::Test);
    splits.knowledge_base = collect(manifest.split->knowledge_base_ids, Split::KnowledgeBase);
    return splits;
}

}  // namespace lprotector
