#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lprotector/embed.hpp"

namespace lprotector {

/// A known-vulnerable example held in the vector store.
struct KnowledgeEntry {
    std::string id;
    std::optional<std::string> cwe_id;
    std::optional<std::string> vuln_name;
    std::optional<std::string> description;
    std::string code;
    EmbeddingVector embedding;

    bool operator==(const KnowledgeEntry&) const = default;
};

/// `score` is the raw cosine similarity between query and entry. It is a
/// ranking score, not a probability.
struct RetrievalHit {
    std::string entry_id;
    double score = 0.0;
    std::size_t rank = 0;

    bool operator==(const RetrievalHit&) const = default;
};

struct NearestHit {
    std::string entry_id;
    double distance = 0.0;

    bool operator==(const NearestHit&) const = default;
};

/// Immutable in-process vector store answering exact queries by full scan.
class VectorStore {
public:
    /// Empty store with an undeclared dimension.
    VectorStore() = default;

    /// `dim` declares the embedding dimension up front (so an empty store
    /// still has one); 0 takes it from the first entry.
    /// Throws Error{DuplicateId} or Error{DimensionMismatch}.
    static VectorStore build(std::vector<KnowledgeEntry> entries, std::size_t dim = 0);

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    /// 0 for an empty store built without a declared dimension.
    std::size_t dim() const noexcept { return dim_; }
    const std::vector<KnowledgeEntry>& entries() const noexcept { return entries_; }
    /// nullptr if absent.
    const KnowledgeEntry* find(const std::string& id) const;

    /// The min(k, size) entries with the highest cosine similarity to `query`,
    /// best first; equal scores are ordered by id ascending.
    /// Throws Error{DimensionMismatch}, Error{ZeroVector}, Error{InvalidInput} for k == 0.
    std::vector<RetrievalHit> top_k(const EmbeddingVector& query, std::size_t k) const;

    /// Entry at minimum Euclidean distance, ties by id ascending.
    /// Throws Error{EmptyStore} or Error{DimensionMismatch}.
    NearestHit nearest(const EmbeddingVector& query) const;

    /// FNV-1a of the serialized entry lines; identical to the header checksum
    /// written by save().
    std::uint64_t checksum() const;

    void save(const std::filesystem::path& path) const;
    /// Throws Error{MissingFile} or Error{CorruptFile}.
    static VectorStore load(const std::filesystem::path& path);

    /// The exact file contents save() writes.
    std::string serialize() const;
    static VectorStore deserialize(const std::string& contents);

    bool operator==(const VectorStore& other) const { return entries_ == other.entries_; }

private:
    void check_query(const EmbeddingVector& query) const;
    std::string serialize_entries() const;

    std::size_t dim_ = 0;
    std::vector<KnowledgeEntry> entries_;
    std::vector<double> norms_;
};

}  // namespace lprotector
