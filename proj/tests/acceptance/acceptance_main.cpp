// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include "lprotector/cli.hpp"
#include "lprotector/corpus.hpp"
#include "lprotector/embed.hpp"
#include "lprotector/error.hpp"
#include "lprotector/llm.hpp"
#include "lprotector/metrics.hpp"
#include "lprotector/pipeline.hpp"
#include "lprotector/prompt.hpp"
#include "lprotector/report.hpp"
#include "lprotector/support.hpp"
#include "lprotector/synthetic.hpp"
#include "lprotector/vstore.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace lprotector;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int number;
    const char* title;
    double budget_seconds;
    std::function<Outcome()> check;
};

std::string fmt(const char* pattern, double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), pattern, value);
    return buffer;
}

KnowledgeEntry make_entry(std::string id, std::vector<double> values) {
    return KnowledgeEntry{std::move(id), std::nullopt, std::nullopt, std::nullopt, "int f(void);",
                          EmbeddingVector(std::move(values))};
}

// ---- 1: F1 formula against the published table -------------------------

double oracle_f1(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

Outcome f1_oracle() {
    struct Row {
        const char* name;
        double precision, recall, reported_f1;
        bool expect_consistent;
    };
    // Percentages as printed in the comparison table.
    const Row rows[] = {
        {"VulDeePecker", 38.44, 12.75, 19.15, true},
        {"Reveal", 17.22, 34.04, 22.87, true},
        {"LProtector", 30.52, 38.07, 33.49, false},
    };
    Outcome out{true, ""};
    for (const auto& row : rows) {
        const double p = row.precision / 100.0;
        const double r = row.recall / 100.0;
        const double oracle = oracle_f1(p, r) * 100.0;

        // Counts realising (p, r) to about 1e-8, fed through compute_metrics.
        ConfusionCounts counts;
        counts.tp = 100000000;
        counts.fp = static_cast<std::size_t>(std::llround(1e8 * (1.0 - p) / p));
        counts.fn = static_cast<std::size_t>(std::llround(1e8 * (1.0 - r) / r));
        counts.tn = 1000;
        const double from_metrics = compute_metrics(counts).f1 * 100.0;

        const auto check = f1_consistency(p, r, row.reported_f1 / 100.0);
        bool ok = std::abs(check.expected_f1 * 100.0 - oracle) < 1e-9 && std::abs(from_metrics - oracle) < 1e-4;
        if (row.expect_consistent) {
            ok = ok && std::abs(from_metrics - row.reported_f1) <= 0.01 && check.consistent;
        } else {
            ok = ok && !check.consistent && std::abs(oracle - 33.88) < 0.005;
        }
        out.pass = out.pass && ok;
        out.detail += std::string(row.name) + " " + fmt("%.3f", from_metrics) + " vs " +
                      fmt("%.2f", row.reported_f1) + (check.consistent ? " ok" : " flagged") + (&row == &rows[2] ? "" : "; ");
    }
    return out;
}

// ---- 2: metrics against a naive counter ---------------------------------

Outcome metrics_bruteforce() {
    std::mt19937_64 rng(2);
    std::size_t mismatches = 0;
    for (int set = 0; set < 100; ++set) {
        const double positive_rate = static_cast<double>(set % 11) / 10.0;
        const double predict_rate = static_cast<double>((set * 7) % 11) / 10.0;
        std::bernoulli_distribution truth(positive_rate);
        std::bernoulli_distribution predicted(predict_rate);
        std::bernoulli_distribution garbage(0.05);
        std::vector<SampleResult> results(1000);
        long tp = 0, fp = 0, tn = 0, fn = 0, fallbacks = 0;
        for (std::size_t i = 0; i < results.size(); ++i) {
            auto& r = results[i];
            r.sample_id = "s" + std::to_string(i);
            r.true_label = truth(rng) ? 1 : 0;
            r.predicted_label = predicted(rng) ? 1 : 0;
            if (garbage(rng)) {
                r.parse_status = ParseStatus::Fallback;
                r.predicted_label = 0;
                ++fallbacks;
            }
            const int t = *r.true_label;
            const int p = r.predicted_label;
            if (t == 1 && p == 1) ++tp;
            if (t == 0 && p == 1) ++fp;
            if (t == 0 && p == 0) ++tn;
            if (t == 1 && p == 0) ++fn;
        }
        const double accuracy = static_cast<double>(tp + tn) / 1000.0;
        const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
        const double f1 = precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);

        const auto counts = confusion(results);
        const auto report = compute_metrics(counts, static_cast<std::size_t>(fallbacks));
        const bool equal = counts.tp == static_cast<std::size_t>(tp) && counts.fp == static_cast<std::size_t>(fp) &&
                           counts.tn == static_cast<std::size_t>(tn) && counts.fn == static_cast<std::size_t>(fn) &&
                           report.accuracy == accuracy && report.precision == precision && report.recall == recall &&
                           report.f1 == f1 && report.parse_fallbacks == static_cast<std::size_t>(fallbacks) &&
                           evaluate_results(results) == report;
        if (!equal) ++mismatches;
    }
    return {mismatches == 0, "100 sets x 1000 samples, " + std::to_string(mismatches) + " mismatches"};
}

// ---- 3: top_k against a full sort ---------------------------------------

// Small integer components make exact score ties common.
std::vector<KnowledgeEntry> integer_entries(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> component(-2, 2);
    std::vector<std::size_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = i;
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<KnowledgeEntry> entries;
    entries.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> v(dim, 0.0);
        do {
            for (auto& x : v) x = component(rng);
        } while (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
        entries.push_back(make_entry("e" + std::to_string(labels[i]), std::move(v)));
    }
    return entries;
}

double naive_cosine(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

Outcome retrieval_exactness() {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> component(-2, 2);
    std::size_t queries = 0;
    std::size_t mismatches = 0;
    std::size_t ties = 0;
    for (std::size_t n : {1u, 7u, 100u, 1000u, 10000u}) {
        const std::size_t dim = 6;
        const auto entries = integer_entries(n, dim, rng);
        const auto store = VectorStore::build(entries);
        for (int q = 0; q < 10; ++q) {
            std::vector<double> qv(dim, 0.0);
            do {
                for (auto& x : qv) x = component(rng);
            } while (std::all_of(qv.begin(), qv.end(), [](double x) { return x == 0.0; }));
            const EmbeddingVector query(qv);

            std::vector<std::pair<double, std::string>> all;
            for (const auto& e : entries) all.emplace_back(naive_cosine(qv, e.embedding.values()), e.id);
            std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
                return a.first != b.first ? a.first > b.first : a.second < b.second;
            });
            for (std::size_t i = 1; i < all.size(); ++i) ties += all[i].first == all[i - 1].first;

            for (std::size_t k : {1u, 5u, 50u}) {
                ++queries;
                const auto hits = store.top_k(query, k);
                const auto expected = std::min(k, all.size());
                bool ok = hits.size() == expected;
                for (std::size_t i = 0; ok && i < expected; ++i) {
                    ok = hits[i].entry_id == all[i].second && hits[i].score == all[i].first && hits[i].rank == i + 1;
                }
                if (!ok) ++mismatches;
            }
        }
    }
    return {mismatches == 0, std::to_string(queries) + " queries on stores of 1..10000 entries (" +
                                 std::to_string(ties) + " tied neighbours), " + std::to_string(mismatches) +
                                 " mismatches"};
}

// ---- 4: cosine and Euclidean agree on unit vectors ----------------------

Outcome metric_agreement() {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t dim = 64;
    auto unit = [&] {
        std::vector<double> v(dim);
        double sq = 0.0;
        for (auto& x : v) {
            x = gauss(rng);
            sq += x * x;
        }
        for (auto& x : v) x /= std::sqrt(sq);
        return v;
    };
    std::vector<KnowledgeEntry> entries;
    for (std::size_t i = 0; i < 1000; ++i) entries.push_back(make_entry("u" + std::to_string(i), unit()));
    const auto store = VectorStore::build(std::move(entries));
    std::size_t agree = 0;
    for (int q = 0; q < 100; ++q) {
        const EmbeddingVector query(unit());
        if (store.top_k(query, 1).front().entry_id == store.nearest(query).entry_id) ++agree;
    }
    return {agree == 100, std::to_string(agree) + "/100 queries agree"};
}

// ---- 5: sampling contract -----------------------------------------------

Outcome sampling_contract() {
    std::mt19937_64 rng(5);
    std::size_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n_vul = 5 + uniform_below(rng, 60);
        const std::size_t n_clean = 5 + uniform_below(rng, 200);
        std::vector<CodeSample> corpus;
        for (std::size_t i = 0; i < n_vul + n_clean; ++i) {
            CodeSample s;
            s.id = "t" + std::to_string(i);
            s.code = "x";
            s.label = i < n_vul ? 1 : 0;
            corpus.push_back(std::move(s));
        }
        std::shuffle(corpus.begin(), corpus.end(), rng);
        const std::size_t half = 1 + uniform_below(rng, std::min(n_vul, n_clean));
        const auto seed = rng();

        const auto test = balanced_sample(corpus, 2 * half, seed);
        const auto again = balanced_sample(corpus, 2 * half, seed);
        const auto pos = static_cast<std::size_t>(
            std::count_if(test.begin(), test.end(), [](const CodeSample& s) { return s.label == 1; }));
        std::set<std::string> test_ids;
        for (const auto& s : test) test_ids.insert(s.id);
        bool ok = test.size() == 2 * half && pos == half && test == again && test_ids.size() == test.size();

        if (half < n_vul) {
            const auto kb = select_knowledge_base(corpus, test, 1 + uniform_below(rng, 80), seed);
            for (const auto& s : kb.samples) ok = ok && s.label == 1 && !test_ids.count(s.id);
        }
        if (!ok) ++violations;
    }
    return {violations == 0, "1000 trials, " + std::to_string(violations) + " violations"};
}

// ---- 6: end-to-end offline ablation --------------------------------------

Outcome offline_pipeline() {
    const std::uint64_t seed = 17;
    const auto corpus = make_planted_corpus(200, 200, seed);
    const auto test = balanced_sample(corpus, 300, seed);
    const auto kb = select_knowledge_base(corpus, test, 50, seed);

    EmbedderConfig embed_config;
    auto embedder = make_embedder(embed_config);
    std::vector<KnowledgeEntry> entries;
    for (const auto& s : kb.samples) {
        entries.push_back({s.id, s.cwe_id, s.vuln_name, s.description, s.code, embedder->embed(s.code)});
    }
    const auto store = VectorStore::build(std::move(entries), embedder->dim());
    HeuristicProvider llm(ProviderConfig{}.heuristic_threshold);
    Providers providers{*embedder, llm, TemplateSet::builtin()};

    PipelineConfig base;
    const auto report = run_ablation_grid(test, store, base, providers);
    const auto markdown = ablation_report_markdown(report);

    const char* names[] = {"RAG + CoT", "No RAG", "No CoT", "No RAG & CoT"};
    bool shaped = report.cells.size() == 4 &&
                  markdown.find("| Variables | Accuracy | Precision | Recall | F1 Score |") != std::string::npos;
    for (std::size_t i = 0; shaped && i < 4; ++i) {
        shaped = report.cells[i].name == names[i] && markdown.find("| " + std::string(names[i]) + " |") !=
                                                         std::string::npos;
    }
    if (!shaped) return {false, "ablation report is not shaped as expected:\n" + markdown};
    const double full = report.cells[0].experiment.metrics.accuracy;
    const double no_rag = report.cells[1].experiment.metrics.accuracy;
    return {full >= 0.95 && full > no_rag,
            "RAG+CoT accuracy " + fmt("%.4f", full) + ", No RAG " + fmt("%.4f", no_rag) + ", No CoT " +
                fmt("%.4f", report.cells[2].experiment.metrics.accuracy) + ", No RAG & CoT " +
                fmt("%.4f", report.cells[3].experiment.metrics.accuracy)};
}

// ---- 7: store round trip ------------------------------------------------

Outcome store_round_trip() {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<KnowledgeEntry> entries;
    for (std::size_t i = 0; i < 500; ++i) {
        std::vector<double> v(32);
        for (auto& x : v) x = gauss(rng) * std::pow(10.0, static_cast<double>(uniform_below(rng, 9)) - 4.0);
        KnowledgeEntry e = make_entry("k" + std::to_string(i), std::move(v));
        e.cwe_id = "CWE-" + std::to_string(uniform_below(rng, 900));
        if (i % 3 == 0) e.vuln_name = "name \"quoted\" \n line";
        if (i % 5 == 0) e.description = "desc\twith tab";
        e.code = "int f" + std::to_string(i) + "(char *p) {\n  return p[0] == '\\\\';\n}\n";
        entries.push_back(std::move(e));
    }
    const auto store = VectorStore::build(entries);
    const auto path = fs::temp_directory_path() / ("lprotector_acceptance_store_" + std::to_string(::getpid()));
    store.save(path);
    const auto loaded = VectorStore::load(path);
    fs::remove(path);

    bool exact = loaded.size() == 500 && loaded.dim() == 32;
    for (std::size_t i = 0; exact && i < entries.size(); ++i) {
        const auto& a = entries[i];
        const auto& b = loaded.entries()[i];
        exact = a.id == b.id && a.cwe_id == b.cwe_id && a.vuln_name == b.vuln_name &&
                a.description == b.description && a.code == b.code && a.embedding.dim() == b.embedding.dim() &&
                std::equal(a.embedding.values().begin(), a.embedding.values().end(), b.embedding.values().begin(),
                           [](double x, double y) { return std::memcmp(&x, &y, sizeof(double)) == 0; });
    }
    std::size_t same = 0;
    for (int q = 0; q < 20; ++q) {
        std::vector<double> v(32);
        for (auto& x : v) x = gauss(rng);
        const EmbeddingVector query(v);
        const auto a = store.top_k(query, 5);
        const auto b = loaded.top_k(query, 5);
        bool equal = a.size() == b.size();
        for (std::size_t i = 0; equal && i < a.size(); ++i) {
            equal = a[i].entry_id == b[i].entry_id && a[i].score == b[i].score && a[i].rank == b[i].rank;
        }
        same += equal;
    }
    return {exact && same == 20, std::string(exact ? "500 entries bit-exact" : "entries differ") + ", " +
                                     std::to_string(same) + "/20 queries unchanged"};
}

// ---- 8: parser fuzzing and the fallback rate ----------------------------

std::string random_response(std::mt19937_64& rng) {
    static const char* pieces[] = {"VERDICT:", "verdict", "Verdict: ", "CHOICE:", "choice: ", "0",  "1",
                                   "2",        "-1",      "007",       "99999999999999999999",  " ", "\n",
                                   "\r\n",     "\t",      ":",         "`",                     "VERDICT: 1",
                                   "CHOICE: 3", "+1",     "1.0",       "\xff\xfe",              "\0", "yes"};
    std::string out;
    const auto parts = uniform_below(rng, 12);
    for (std::uint64_t i = 0; i < parts; ++i) {
        if (uniform_below(rng, 3) == 0) {
            const auto len = uniform_below(rng, 16);
            for (std::uint64_t j = 0; j < len; ++j) out.push_back(static_cast<char>(uniform_below(rng, 256)));
        } else {
            const auto* piece = pieces[uniform_below(rng, std::size(pieces))];
            out += piece[0] == '\0' ? std::string(1, '\0') : std::string(piece);
        }
    }
    return out;
}

Outcome robust_parsing() {
    std::mt19937_64 rng(8);
    std::size_t crashes = 0, bad_values = 0, parsed_verdicts = 0, parsed_choices = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto text = random_response(rng);
        const std::size_t n = 1 + uniform_below(rng, 5);
        try {
            const int v = parse_verdict(text).label;
            ++parsed_verdicts;
            if (v != 0 && v != 1) ++bad_values;
        } catch (const Error& e) {
            if (e.code() != Errc::ParseFailure) ++crashes;
        } catch (...) {
            ++crashes;
        }
        try {
            const auto c = parse_choice(text, n);
            ++parsed_choices;
            if (c < 1 || c > n) ++bad_values;
        } catch (const Error& e) {
            if (e.code() != Errc::ParseFailure && e.code() != Errc::OutOfRange) ++crashes;
        } catch (...) {
            ++crashes;
        }
    }

    // 200 samples; 20 get garbage on the first ask and on the re-ask.
    std::vector<CodeSample> test;
    std::map<std::string, std::string> script;
    const auto& templates = TemplateSet::builtin();
    for (std::size_t i = 0; i < 200; ++i) {
        CodeSample s;
        s.id = "f" + std::to_string(1000 + i);
        s.label = static_cast<int>(i % 2);
        s.code = "int f" + std::to_string(i) + "(int x) { return x + " + std::to_string(i) + "; }";
        if (i % 10 != 3) {
            const auto prompt = build_classification_prompt(s.code, {}, true, templates);
            script[prompt_digest(prompt)] = "1. reading\n\nVERDICT: " + std::to_string(s.label);
        }
        test.push_back(std::move(s));
    }
    ScriptedProvider llm(script, "I am not sure what you mean.");
    auto embedder = make_embedder(EmbedderConfig{});
    Providers providers{*embedder, llm, templates};
    PipelineConfig config;
    config.rag_enabled = false;
    const auto experiment = run_experiment(test, VectorStore{}, config, providers);
    bool binary = experiment.results.size() == 200;
    for (const auto& r : experiment.results) binary = binary && (r.predicted_label == 0 || r.predicted_label == 1);
    const auto& m = experiment.metrics;
    const bool rate_ok = m.parse_fallbacks == 20 && m.parse_fallback_rate == 0.1;
    return {crashes == 0 && bad_values == 0 && binary && rate_ok,
            "10000 fuzz strings: " + std::to_string(crashes) + " crashes, " + std::to_string(parsed_verdicts) +
                " verdicts and " + std::to_string(parsed_choices) + " choices parsed; fallback rate " +
                fmt("%.4f", m.parse_fallback_rate) + " (" + std::to_string(m.parse_fallbacks) + "/200)"};
}

// ---- 9: determinism ------------------------------------------------------

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "lprotector");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    if (code != 0) std::cerr << err.str();
    return code;
}

Outcome determinism() {
    const auto dir = fs::temp_directory_path() / ("lprotector_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto p = [&](const char* name) { return (dir / name).string(); };

    bool ok = cli({"synth", "--out", p("corpus.csv"), "--vulnerable", "120", "--clean", "120", "--seed", "9"}) == 0 &&
              cli({"ingest", p("corpus.csv"), "--out", p("manifest.json"), "--id-column", "id"}) == 0 &&
              cli({"split", p("manifest.json"), "--n-test", "160", "--kb-size", "40", "--seed", "9"}) == 0 &&
              cli({"index", p("manifest.json"), "--store", p("store.jsonl")}) == 0;
    for (const char* out : {"run_a", "run_b"}) {
        ok = ok && cli({"evaluate", p("manifest.json"), "--store", p("store.jsonl"), "--out", p(out), "--provider",
                        "heuristic", "--with-baselines"}) == 0;
    }
    ok = ok && cli({"evaluate", p("manifest.json"), "--store", p("store.jsonl"), "--out", p("run_c"), "--provider",
                    "heuristic", "--with-baselines", "--parallelism", "4"}) == 0;
    if (!ok) return {false, "CLI run failed"};
    const bool json_identical = read_file(p("run_a.json")) == read_file(p("run_b.json"));
    const bool json_parallel = read_file(p("run_a.json")) == read_file(p("run_c.json"));
    const bool md_identical = read_file(p("run_a.md")) == read_file(p("run_b.md"));

    // In process: parallelism 1 vs 4 with both deterministic providers.
    const auto manifest = load_manifest(p("manifest.json"));
    const auto splits = resolve_splits(manifest);
    const auto store = VectorStore::load(p("store.jsonl"));
    auto embedder = make_embedder(EmbedderConfig{});
    HeuristicProvider heuristic(ProviderConfig{}.heuristic_threshold);
    ScriptedProvider scripted({}, "VERDICT: 1\nCHOICE: 2");
    bool metrics_equal = true;
    for (LlmProvider* llm : {static_cast<LlmProvider*>(&heuristic), static_cast<LlmProvider*>(&scripted)}) {
        Providers providers{*embedder, *llm, TemplateSet::builtin()};
        PipelineConfig serial;
        PipelineConfig parallel;
        parallel.parallelism = 4;
        const auto a = run_experiment(splits.test, store, serial, providers);
        const auto b = run_experiment(splits.test, store, parallel, providers);
        metrics_equal = metrics_equal && a.metrics == b.metrics && a.results.size() == b.results.size();
        for (std::size_t i = 0; metrics_equal && i < a.results.size(); ++i) {
            metrics_equal = to_json(a.results[i], false) == to_json(b.results[i], false);
        }
    }
    fs::remove_all(dir);
    return {json_identical && md_identical && json_parallel && metrics_equal,
            std::string("repeat runs ") + (json_identical && md_identical ? "byte-identical" : "DIFFER") +
                ", CLI parallelism 4 report " + (json_parallel ? "identical" : "DIFFERS") +
                ", in-process parallelism 1 vs 4 " + (metrics_equal ? "identical" : "DIFFER")};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "F1 formula oracle vs published table", 1.0, f1_oracle},
        {2, "metrics vs naive counter", 5.0, metrics_bruteforce},
        {3, "top_k exactness vs full sort", 30.0, retrieval_exactness},
        {4, "argmax cosine == argmin Euclidean on unit vectors", 10.0, metric_agreement},
        {5, "balanced sampling contract", 10.0, sampling_contract},
        {6, "offline end-to-end ablation", 60.0, offline_pipeline},
        {7, "store persistence round trip", 5.0, store_round_trip},
        {8, "robust verdict/choice parsing", 5.0, robust_parsing},
        {9, "determinism", 60.0, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds < c.budget_seconds;
        const bool pass = outcome.pass && in_budget;
        if (!pass) ++failures;
        std::cout << "AC" << c.number << " " << (pass ? "PASS" : "FAIL") << "  " << c.title << ": " << outcome.detail
                  << " [" << fmt("%.2f", seconds) << " s" << (in_budget ? "" : ", over budget") << "]\n";
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}
