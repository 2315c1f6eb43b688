#include "lprotector/support.hpp"
#include "lprotector/vstore.hpp"

#include "test_util.hpp"

#include <random>

namespace lprotector {
namespace {

using testing::TempDir;

KnowledgeEntry entry(std::string id, std::vector<double> v) {
    return {std::move(id), "CWE-119", "Overflow", "desc", "int f(void);", EmbeddingVector(std::move(v))};
}

EmbeddingVector vec(std::vector<double> v) { return EmbeddingVector(std::move(v)); }

TEST(Build, SizeDuplicatesAndDims) {
    std::vector<KnowledgeEntry> entries;
    for (int i = 0; i < 500; ++i) entries.push_back(entry("k" + std::to_string(i), {1.0, double(i)}));
    EXPECT_EQ(VectorStore::build(entries).size(), 500u);
    EXPECT_ERRC(VectorStore::build({entry("a", {1, 0}), entry("a", {0, 1})}), Errc::DuplicateId);
    EXPECT_ERRC(VectorStore::build({entry("a", {1, 0}), entry("b", {0, 1, 0})}), Errc::DimensionMismatch);
    EXPECT_ERRC(VectorStore::build({entry("a", {1, 0})}, 3), Errc::DimensionMismatch);
}

TEST(TopK, EmptyStoreReturnsNoHits) {
    const auto store = VectorStore::build({});
    EXPECT_TRUE(store.empty());
    EXPECT_TRUE(store.top_k(vec({1, 0}), 5).empty());
    EXPECT_ERRC(store.nearest(vec({1, 0})), Errc::EmptyStore);
}

TEST(TopK, SingleEntryAndClamp) {
    const auto one = VectorStore::build({entry("only", {0.2, 0.9})});
    const auto hits = one.top_k(vec({-1, 3}), 5);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_EQ(hits[0].entry_id, "only");
    EXPECT_EQ(hits[0].rank, 1u);

    const auto three = VectorStore::build({entry("a", {1, 0}), entry("b", {0, 1}), entry("c", {1, 1})});
    EXPECT_EQ(three.top_k(vec({1, 2}), 5).size(), 3u);
}

TEST(TopK, HandComputedOrder) {
    const auto store = VectorStore::build({entry("x", {1, 0}), entry("y", {0.6, 0.8}), entry("z", {0, 1})});
    const auto hits = store.top_k(vec({1, 0}), 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].entry_id, "x");
    EXPECT_DOUBLE_EQ(hits[0].score, 1.0);
    EXPECT_EQ(hits[1].entry_id, "y");
    EXPECT_NEAR(hits[1].score, 0.6, 1e-12);
    EXPECT_EQ(hits[1].rank, 2u);
}

TEST(TopK, TiesBreakByIdAscending) {
    const auto store = VectorStore::build({entry("m", {2, 0}), entry("b", {1, 0}), entry("z", {5, 0}), entry("a", {0, 1})});
    const auto hits = store.top_k(vec({1, 0}), 3);
    EXPECT_EQ(hits[0].entry_id, "b");
    EXPECT_EQ(hits[1].entry_id, "m");
    EXPECT_EQ(hits[2].entry_id, "z");
}

TEST(TopK, Errors) {
    const auto store = VectorStore::build({entry("a", {1, 0})});
    EXPECT_ERRC(store.top_k(vec({1, 0}), 0), Errc::InvalidInput);
    EXPECT_ERRC(store.top_k(vec({0, 0}), 1), Errc::ZeroVector);
    EXPECT_ERRC(store.top_k(vec({1, 0, 0}), 1), Errc::DimensionMismatch);
}

TEST(Nearest, HandExamples) {
    const auto store = VectorStore::build({entry("origin", {0, 0}), entry("far", {3, 4})});
    const auto hit = store.nearest(vec({1, 1}));
    EXPECT_EQ(hit.entry_id, "origin");
    EXPECT_NEAR(hit.distance, std::sqrt(2.0), 1e-12);
    const auto exact = store.nearest(vec({3, 4}));
    EXPECT_EQ(exact.entry_id, "far");
    EXPECT_DOUBLE_EQ(exact.distance, 0.0);
}

TEST(Persistence, RoundTripIsExact) {
    TempDir dir;
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<KnowledgeEntry> entries;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> v(8);
        for (auto& x : v) x = g(rng) * 1e-7;
        auto e = entry("e" + std::to_string(i), v);
        if (i % 2) e.description.reset();
        e.code = "char s[] = \"\\n\\té\";\n";
        entries.push_back(std::move(e));
    }
    const auto store = VectorStore::build(entries);
    store.save(dir / "s.jsonl");
    const auto loaded = VectorStore::load(dir / "s.jsonl");
    EXPECT_TRUE(loaded == store);
    EXPECT_EQ(loaded.checksum(), store.checksum());
    EXPECT_EQ(loaded.serialize(), store.serialize());
}

TEST(Persistence, EmptyStoreKeepsDim) {
    const auto store = VectorStore::build({}, 16);
    const auto loaded = VectorStore::deserialize(store.serialize());
    EXPECT_EQ(loaded.dim(), 16u);
    EXPECT_TRUE(loaded.empty());
}

TEST(Persistence, CorruptionDetected) {
    TempDir dir;
    const auto store = VectorStore::build({entry("a", {1, 0}), entry("b", {0, 1})});
    const auto text = store.serialize();
    EXPECT_ERRC(VectorStore::deserialize(text.substr(0, text.size() / 2)), Errc::CorruptFile);
    EXPECT_ERRC(VectorStore::deserialize("not json\n"), Errc::CorruptFile);
    EXPECT_ERRC(VectorStore::deserialize(""), Errc::CorruptFile);
    auto tampered = text;
    tampered.replace(tampered.find("\"a\""), 3, "\"c\"");
    EXPECT_ERRC(VectorStore::deserialize(tampered), Errc::CorruptFile);
    EXPECT_ERRC(VectorStore::load(dir / "missing.jsonl"), Errc::MissingFile);
}

}  // namespace
}  // namespace lprotector
