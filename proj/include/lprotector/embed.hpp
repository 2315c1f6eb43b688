#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lprotector/http.hpp"

namespace lprotector {

/// Fixed-length vector of finite reals. The zero vector is representable; the
/// similarity functions reject it where a direction is required.
class EmbeddingVector {
public:
    /// Throws Error{InvalidInput} when `values` is empty or holds NaN/inf.
    explicit EmbeddingVector(std::vector<double> values);

    std::size_t dim() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double norm() const noexcept;

    bool operator==(const EmbeddingVector&) const = default;

private:
    std::vector<double> values_;
};

/// (a . b) / (|a| |b|), clamped to [-1, 1].
/// Throws Error{DimensionMismatch} or Error{ZeroVector}.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// |a - b|_2. Throws Error{DimensionMismatch}.
double euclidean_distance(const EmbeddingVector& a, const EmbeddingVector& b);

enum class EmbedderKind { Remote, HashedLocal };
enum class Normalization { None, L2 };

std::string_view to_string(EmbedderKind kind) noexcept;
std::string_view to_string(Normalization normalization) noexcept;

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::HashedLocal;
    std::size_t dim = 256;
    Normalization normalization = Normalization::L2;
    std::optional<std::string> model_id;
    std::optional<std::string> endpoint;
    /// Remote only. Longer texts lose their tail before being sent.
    std::size_t max_chars = 24000;
    int max_retries = 3;
    std::chrono::milliseconds timeout{60000};
    /// Remote only; JSON-lines response cache. No caching when unset.
    std::optional<std::filesystem::path> cache_path;

    /// Throws Error{InvalidConfig}.
    void validate() const;
};

struct EmbeddingResult {
    EmbeddingVector vector;
    bool truncated = false;
    bool from_cache = false;
};

class Embedder {
public:
    virtual ~Embedder() = default;

    /// Throws Error{EmptyText} for blank input.
    virtual EmbeddingResult embed_detailed(std::string_view text) = 0;
    virtual std::size_t dim() const noexcept = 0;
    /// Stable description of the embedding function, recorded in manifests.
    virtual std::string fingerprint() const = 0;

    EmbeddingVector embed(std::string_view text) { return embed_detailed(text).vector; }
};

/// Splits one line of code into maximal runs of identifier characters
/// ([A-Za-z0-9_]) and maximal runs of other non-space characters.
std::vector<std::string> tokenize_code(std::string_view line);

/// Offline embedder: unigram and within-line bigram token features hashed
/// (FNV-1a) into `dim` buckets, counted, then optionally L2-normalized.
/// Reordering lines does not change the output.
class HashedEmbedder final : public Embedder {
public:
    HashedEmbedder(std::size_t dim, Normalization normalization);

    EmbeddingResult embed_detailed(std::string_view text) override;
    std::size_t dim() const noexcept override { return dim_; }
    std::string fingerprint() const override;

private:
    std::size_t dim_;
    Normalization normalization_;
};

/// Content-addressed store of remote embeddings, keyed by (model id, SHA-256
/// of the embedded text). Persisted as JSON-lines
/// {"model_id", "text_hash", "vector"}; new entries are appended.
/// Lookups take a shared lock, inserts an exclusive one.
class EmbeddingCache {
public:
    EmbeddingCache() = default;
    /// Loads existing entries. A missing file is an empty cache; a malformed
    /// line throws Error{CorruptFile}.
    explicit EmbeddingCache(std::filesystem::path path);

    std::optional<EmbeddingVector> lookup(const std::string& model_id, const std::string& text_hash) const;
    void insert(const std::string& model_id, const std::string& text_hash, const EmbeddingVector& vector);
    std::size_t size() const;

private:
    static std::string key(const std::string& model_id, const std::string& text_hash);

    std::optional<std::filesystem::path> path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, EmbeddingVector> entries_;
};

/// OpenAI-style embeddings endpoint: POST {"model", "input"} and read
/// data[0].embedding. The credential comes from the environment.
class RemoteEmbedder final : public Embedder {
public:
    RemoteEmbedder(EmbedderConfig config, std::shared_ptr<HttpTransport> transport,
                   std::shared_ptr<EmbeddingCache> cache, std::optional<std::string> api_key);

    EmbeddingResult embed_detailed(std::string_view text) override;
    std::size_t dim() const noexcept override { return config_.dim; }
    std::string fingerprint() const override;

    void set_retry_sleep(std::function<void(std::chrono::milliseconds)> sleep) { retry_.sleep = std::move(sleep); }

private:
    EmbedderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<EmbeddingCache> cache_;
    std::optional<std::string> api_key_;
    RetryPolicy retry_;
};

inline constexpr const char* kApiKeyEnv = "LPROTECTOR_API_KEY";

/// Builds the embedder described by `config`. Remote embedders read the
/// credential from LPROTECTOR_API_KEY and use `transport` (or a real HTTP
/// transport when null).
std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config,
                                        std::shared_ptr<HttpTransport> transport = nullptr);

/// One-shot convenience over make_embedder.
EmbeddingVector embed_text(std::string_view text, const EmbedderConfig& config);

}  // namespace lprotector
