#include "lprotector/pipeline.hpp"
#include "lprotector/support.hpp"
#include "lprotector/synthetic.hpp"

#include "test_util.hpp"

#include <atomic>
#include <fstream>

namespace lprotector {
namespace {

using testing::TempDir;

constexpr const char* kVulnerable = "void f(char *in)\n{\n    char buf[16];\n    strcpy(buf, in);\n}\n";

std::vector<CodeSample> samples(std::size_t vul, std::size_t clean) {
    std::vector<CodeSample> out;
    for (std::size_t i = 0; i < vul + clean; ++i) {
        CodeSample s;
        s.id = "t" + std::to_string(100 + i);
        s.label = i < vul ? 1 : 0;
        s.code = "int g" + std::to_string(i) + "(int v)\n{\n    return v * " + std::to_string(i) + ";\n}\n";
        out.push_back(s);
    }
    return out;
}

VectorStore store_of(Embedder& embedder, const std::vector<std::string>& codes) {
    std::vector<KnowledgeEntry> entries;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        entries.push_back({"kb" + std::to_string(i), "CWE-120", "Overflow", "desc", codes[i], embedder.embed(codes[i])});
    }
    return VectorStore::build(std::move(entries), embedder.dim());
}

// Answers from a fixed list of responses in call order; thread-safe.
class SequenceProvider : public LlmProvider {
public:
    explicit SequenceProvider(std::vector<std::string> responses) : responses_(std::move(responses)) {}
    std::string complete(const PromptSpec& prompt) override {
        prompts.push_back(prompt);
        const auto i = next_++;
        return responses_[std::min(i, responses_.size() - 1)];
    }
    ProviderKind kind() const noexcept override { return ProviderKind::Scripted; }
    std::string model() const override { return "sequence"; }
    std::vector<PromptSpec> prompts;

private:
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
};

// Fails every call after the first `budget` ones.
class FlakyProvider : public LlmProvider {
public:
    explicit FlakyProvider(std::size_t budget) : budget_(budget) {}
    std::string complete(const PromptSpec&) override {
        if (calls_++ >= budget_) throw Error(Errc::ProviderUnavailable, "down");
        return "VERDICT: 1";
    }
    ProviderKind kind() const noexcept override { return ProviderKind::Scripted; }
    std::string model() const override { return "flaky"; }
    std::size_t calls() const { return calls_; }

private:
    std::size_t budget_;
    std::atomic<std::size_t> calls_{0};
};

struct Fixture {
    HashedEmbedder embedder{128, Normalization::L2};
};

TEST(Detect, NoRagNoCot) {
    Fixture f;
    ScriptedProvider llm({}, "VERDICT: 0");
    Providers providers{f.embedder, llm};
    PipelineConfig config;
    config.rag_enabled = false;
    config.cot_enabled = false;
    const auto r = detect(kVulnerable, VectorStore{}, config, providers);
    EXPECT_EQ(r.predicted_label, 0);
    EXPECT_EQ(r.parse_status, ParseStatus::Parsed);
    EXPECT_FALSE(r.retrieval.has_value());
    EXPECT_FALSE(r.chosen_context.has_value());
}

TEST(Detect, SingleEntryStoreSkipsRerank) {
    Fixture f;
    const auto store = store_of(f.embedder, {kVulnerable});
    SequenceProvider llm({"VERDICT: 1"});
    Providers providers{f.embedder, llm};
    PipelineConfig config;
    const auto r = detect(kVulnerable, store, config, providers);
    EXPECT_EQ(r.chosen_context, "kb0");
    EXPECT_EQ(r.predicted_label, 1);
    ASSERT_EQ(llm.prompts.size(), 1u);
    EXPECT_EQ(llm.prompts[0].kind, PromptKind::Classification);
    EXPECT_EQ(llm.prompts[0].context.size(), 1u);
}

TEST(Detect, LlmRerankSelectsChosenCandidate) {
    Fixture f;
    const auto store = store_of(f.embedder, {"strcpy(a, b);", "gets(a);", "memcpy(a, b, n);"});
    SequenceProvider llm({"CHOICE: 3", "VERDICT: 1"});
    Providers providers{f.embedder, llm};
    const auto r = detect(kVulnerable, store, PipelineConfig{}, providers);
    ASSERT_TRUE(r.retrieval.has_value());
    EXPECT_EQ(r.retrieval->size(), 3u);
    EXPECT_EQ(r.chosen_context, (*r.retrieval)[2].entry_id);
    EXPECT_FALSE(r.rerank_fallback);
    EXPECT_EQ(llm.prompts[0].kind, PromptKind::Rerank);
    EXPECT_EQ(llm.prompts[1].context.at(0).entry.id, r.chosen_context);
}

TEST(Detect, BadRerankFallsBackToTopHit) {
    Fixture f;
    const auto store = store_of(f.embedder, {"strcpy(a, b);", "gets(a);"});
    SequenceProvider llm({"CHOICE: 9", "VERDICT: 0"});
    Providers providers{f.embedder, llm};
    const auto r = detect(kVulnerable, store, PipelineConfig{}, providers);
    EXPECT_TRUE(r.rerank_fallback);
    EXPECT_EQ(r.chosen_context, r.retrieval->front().entry_id);
}

TEST(Detect, MaxScoreAndAllContextModes) {
    Fixture f;
    const auto store = store_of(f.embedder, {"strcpy(a, b);", "gets(a);", "x = 1;"});
    SequenceProvider llm({"VERDICT: 1"});
    Providers providers{f.embedder, llm};
    PipelineConfig config;
    config.rerank_mode = RerankMode::MaxScore;
    auto r = detect(kVulnerable, store, config, providers);
    EXPECT_EQ(r.chosen_context, r.retrieval->front().entry_id);
    EXPECT_EQ(llm.prompts.size(), 1u);

    config.context_mode = ContextMode::All;
    r = detect(kVulnerable, store, config, providers);
    EXPECT_FALSE(r.chosen_context.has_value());
    EXPECT_EQ(llm.prompts.back().context.size(), 3u);
}

TEST(Detect, ReaskOnceThenFallback) {
    Fixture f;
    PipelineConfig config;
    config.rag_enabled = false;
    SequenceProvider recovers({"hmm", "VERDICT: 1"});
    Providers p1{f.embedder, recovers};
    auto r = detect(kVulnerable, VectorStore{}, config, p1);
    EXPECT_EQ(r.predicted_label, 1);
    EXPECT_EQ(r.parse_status, ParseStatus::Parsed);
    EXPECT_EQ(r.verdict_retries, 1);
    EXPECT_TRUE(recovers.prompts[1].user_text.ends_with(std::string(kVerdictReminder)));

    SequenceProvider never({"hmm"});
    Providers p2{f.embedder, never};
    r = detect(kVulnerable, VectorStore{}, config, p2);
    EXPECT_EQ(r.predicted_label, PipelineConfig::kFallbackLabel);
    EXPECT_EQ(r.parse_status, ParseStatus::Fallback);
    EXPECT_EQ(never.prompts.size(), 2u);
}

TEST(Detect, Errors) {
    Fixture f;
    ScriptedProvider llm({}, "VERDICT: 0");
    Providers providers{f.embedder, llm};
    EXPECT_ERRC(detect("   ", VectorStore{}, PipelineConfig{}, providers), Errc::EmptyCode);
    EXPECT_ERRC(detect(kVulnerable, VectorStore{}, PipelineConfig{}, providers), Errc::EmptyStore);
    PipelineConfig wide;
    wide.top_k = 6;
    EXPECT_ERRC(detect(kVulnerable, store_of(f.embedder, {"a;"}), wide, providers), Errc::InvalidConfig);
    wide.rerank_mode = RerankMode::MaxScore;
    EXPECT_NO_THROW(detect(kVulnerable, store_of(f.embedder, {"a;"}), wide, providers));
}

TEST(Detect, PlantedPatternsWithHeuristic) {
    HashedEmbedder embedder(256, Normalization::L2);
    const auto corpus = make_planted_corpus(60, 60, 5);
    std::vector<std::string> kb_codes;
    for (std::size_t i = 0; i < 30; ++i) kb_codes.push_back(corpus[i].code);
    const auto store = store_of(embedder, kb_codes);
    HeuristicProvider llm(ProviderConfig{}.heuristic_threshold);
    Providers providers{embedder, llm};
    std::size_t correct = 0;
    std::size_t total = 0;
    for (std::size_t i = 30; i < corpus.size(); i += 3) {
        correct += detect(corpus[i].code, store, PipelineConfig{}, providers).predicted_label == corpus[i].label;
        ++total;
    }
    EXPECT_GE(static_cast<double>(correct) / static_cast<double>(total), 0.9);
}

TEST(Experiment, AllVulnerableScript) {
    Fixture f;
    ScriptedProvider llm({}, "VERDICT: 1");
    Providers providers{f.embedder, llm};
    PipelineConfig config;
    config.rag_enabled = false;
    const auto test = samples(4, 6);
    const auto e = run_experiment(test, VectorStore{}, config, providers);
    EXPECT_EQ(e.metrics.counts.tp, 4u);
    EXPECT_EQ(e.metrics.counts.fp, 6u);
    EXPECT_DOUBLE_EQ(e.metrics.recall, 1.0);
    ASSERT_EQ(e.results.size(), 10u);
    EXPECT_TRUE(std::is_sorted(e.results.begin(), e.results.end(),
                               [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; }));
    EXPECT_EQ(e.metadata.test_set_size, 10u);
    EXPECT_EQ(e.metadata.test_set_digest, test_set_digest(test));
}

TEST(Experiment, ParallelismDoesNotChangeResults) {
    Fixture f;
    const auto test = samples(20, 20);
    const auto store = store_of(f.embedder, {"int g(int v) { return v * 3; }", "strcpy(a, b);", "gets(s);"});
    HeuristicProvider llm(0.6);
    Providers providers{f.embedder, llm};
    PipelineConfig serial;
    PipelineConfig parallel;
    parallel.parallelism = 4;
    const auto a = run_experiment(test, store, serial, providers);
    const auto b = run_experiment(test, store, parallel, providers);
    EXPECT_EQ(a.metrics, b.metrics);
    for (std::size_t i = 0; i < a.results.size(); ++i) {
        EXPECT_EQ(to_json(a.results[i], false), to_json(b.results[i], false));
    }
}

TEST(Experiment, Errors) {
    Fixture f;
    ScriptedProvider llm({}, "VERDICT: 1");
    Providers providers{f.embedder, llm};
    PipelineConfig config;
    config.rag_enabled = false;
    EXPECT_ERRC(run_experiment({}, VectorStore{}, config, providers), Errc::EmptyTestSet);
    auto dup = samples(1, 1);
    dup[1].id = dup[0].id;
    EXPECT_ERRC(run_experiment(dup, VectorStore{}, config, providers), Errc::DuplicateId);
}

TEST(Experiment, JournalResumesAfterFailure) {
    Fixture f;
    TempDir dir;
    const auto test = samples(5, 5);
    PipelineConfig config;
    config.rag_enabled = false;
    ExperimentOptions options;
    options.journal = dir / "run.journal.jsonl";

    FlakyProvider flaky(4);
    Providers p1{f.embedder, flaky};
    EXPECT_ERRC(run_experiment(test, VectorStore{}, config, p1, options), Errc::ProviderUnavailable);

    FlakyProvider healthy(100);
    Providers p2{f.embedder, healthy};
    const auto resumed = run_experiment(test, VectorStore{}, config, p2, options);
    EXPECT_EQ(resumed.resumed, 4u);
    EXPECT_EQ(healthy.calls(), 6u);
    EXPECT_EQ(resumed.results.size(), 10u);

    PipelineConfig other = config;
    other.cot_enabled = false;
    EXPECT_ERRC(run_experiment(test, VectorStore{}, other, p2, options), Errc::InvalidConfig);
    ScriptedProvider different({}, "VERDICT: 1");
    Providers p3{f.embedder, different};
    EXPECT_ERRC(run_experiment(test, VectorStore{}, config, p3, options), Errc::InvalidConfig);
}

TEST(Ablation, FourCellsInOrder) {
    Fixture f;
    const auto test = samples(3, 3);
    const auto store = store_of(f.embedder, {"strcpy(a, b);", "gets(s);"});
    HeuristicProvider llm(0.5);
    Providers providers{f.embedder, llm};
    const auto checksum = store.checksum();
    const auto report = run_ablation_grid(test, store, PipelineConfig{}, providers);
    EXPECT_EQ(store.checksum(), checksum);
    EXPECT_EQ(store.size(), 2u);
    ASSERT_EQ(report.cells.size(), 4u);
    for (const auto& r : report.cells[1].experiment.results) EXPECT_FALSE(r.retrieval.has_value());
    for (const auto& r : report.cells[0].experiment.results) EXPECT_TRUE(r.retrieval.has_value());
    const std::pair<bool, bool> switches[] = {{true, true}, {false, true}, {true, false}, {false, false}};
    const char* names[] = {"RAG + CoT", "No RAG", "No CoT", "No RAG & CoT"};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(report.cells[i].name, names[i]);
        EXPECT_EQ(report.cells[i].experiment.metadata.config.rag_enabled, switches[i].first);
        EXPECT_EQ(report.cells[i].experiment.metadata.config.cot_enabled, switches[i].second);
        EXPECT_EQ(report.cells[i].experiment.results.size(), 6u);
        EXPECT_EQ(report.cells[i].experiment.metrics.counts.total(), 6u);
    }
}

}  // namespace
}  // namespace lprotector
