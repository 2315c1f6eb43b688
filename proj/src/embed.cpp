#include "lprotector/embed.hpp"

#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>

namespace lprotector {

EmbeddingVector::EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw Error(Errc::InvalidInput, "embedding must have at least one dimension");
    }
    if (!std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(Errc::InvalidInput, "embedding contains a non-finite value");
    }
}

double EmbeddingVector::norm() const noexcept {
    double sum = 0.0;
    for (double v : values_) sum += v * v;
    return std::sqrt(sum);
}

namespace {

void require_same_dim(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw Error(Errc::DimensionMismatch,
                    "dimensions differ: " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
    }
}

}  // namespace

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    require_same_dim(a, b);
    double dot = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) {
        throw Error(Errc::ZeroVector, "cosine similarity is undefined for a zero vector");
    }
    return std::clamp(dot / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

double euclidean_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
    require_same_dim(a, b);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

std::string_view to_string(EmbedderKind kind) noexcept {
    return kind == EmbedderKind::Remote ? "remote" : "hashed_local";
}

std::string_view to_string(Normalization normalization) noexcept {
    return normalization == Normalization::L2 ? "l2" : "none";
}

void EmbedderConfig::validate() const {
    if (dim == 0) {
        throw Error(Errc::InvalidConfig, "embedding dim must be at least 1");
    }
    if (kind == EmbedderKind::Remote) {
        if (!model_id || model_id->empty()) throw Error(Errc::InvalidConfig, "remote embedder needs a model id");
        if (!endpoint || endpoint->empty()) throw Error(Errc::InvalidConfig, "remote embedder needs an endpoint");
        if (max_chars == 0) throw Error(Errc::InvalidConfig, "max_chars must be positive");
    }
}

namespace {

bool is_identifier_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_space_char(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

void normalize_l2(std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    if (sum == 0.0) return;
    const double inv = 1.0 / std::sqrt(sum);
    for (double& v : values) v *= inv;
}

}  // namespace

std::vector<std::string> tokenize_code(std::string_view line) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        if (is_space_char(line[i])) {
            ++i;
            continue;
        }
        const bool identifier = is_identifier_char(line[i]);
        const std::size_t start = i;
        while (i < line.size() && !is_space_char(line[i]) && is_identifier_char(line[i]) == identifier) ++i;
        tokens.emplace_back(line.substr(start, i - start));
    }
    return tokens;
}

HashedEmbedder::HashedEmbedder(std::size_t dim, Normalization normalization)
    : dim_(dim), normalization_(normalization) {
    if (dim_ == 0) {
        throw Error(Errc::InvalidConfig, "embedding dim must be at least 1");
    }
}

EmbeddingResult HashedEmbedder::embed_detailed(std::string_view text) {
    if (is_blank(text)) {
        throw Error(Errc::EmptyText, "cannot embed blank text");
    }
    std::vector<double> buckets(dim_, 0.0);
    auto bump = [&](std::uint64_t hash) { buckets[hash % dim_] += 1.0; };

    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto tokens = tokenize_code(text.substr(pos, end - pos));
        for (std::size_t t = 0; t < tokens.size(); ++t) {
            bump(fnv1a64(tokens[t], fnv1a64("1:")));
            if (t + 1 < tokens.size()) {
                bump(fnv1a64(tokens[t + 1], fnv1a64("\x1f", fnv1a64(tokens[t], fnv1a64("2:")))));
            }
        }
        pos = end + 1;
    }
    if (normalization_ == Normalization::L2) normalize_l2(buckets);
    return {EmbeddingVector(std::move(buckets)), false, false};
}

std::string HashedEmbedder::fingerprint() const {
    return "hashed_local:v1:dim=" + std::to_string(dim_) + ":norm=" + std::string(to_string(normalization_));
}

EmbeddingCache::EmbeddingCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(*path_);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        try {
            const auto doc = nlohmann::json::parse(line);
            entries_.insert_or_assign(
                key(doc.at("model_id").get<std::string>(), doc.at("text_hash").get<std::string>()),
                EmbeddingVector(doc.at("vector").get<std::vector<double>>()));
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::CorruptFile,
                        path_->string() + " line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::string EmbeddingCache::key(const std::string& model_id, const std::string& text_hash) {
    return model_id + '\n' + text_hash;
}

std::optional<EmbeddingVector> EmbeddingCache::lookup(const std::string& model_id,
                                                      const std::string& text_hash) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(key(model_id, text_hash));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::insert(const std::string& model_id, const std::string& text_hash,
                            const EmbeddingVector& vector) {
    std::unique_lock lock(mutex_);
    const auto [it, inserted] = entries_.insert_or_assign(key(model_id, text_hash), vector);
    (void)it;
    if (!inserted || !path_) return;
    nlohmann::ordered_json line;
    line["model_id"] = model_id;
    line["text_hash"] = text_hash;
    line["vector"] = std::vector<double>(vector.values().begin(), vector.values().end());
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    out << line.dump() << '\n';
}

std::size_t EmbeddingCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig config, std::shared_ptr<HttpTransport> transport,
                               std::shared_ptr<EmbeddingCache> cache, std::optional<std::string> api_key)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(std::move(cache)),
      api_key_(std::move(api_key)) {
    config_.validate();
    if (!transport_) {
        throw Error(Errc::InvalidConfig, "remote embedder needs a transport");
    }
    retry_.max_retries = config_.max_retries;
}

EmbeddingResult RemoteEmbedder::embed_detailed(std::string_view text) {
    if (is_blank(text)) {
        throw Error(Errc::EmptyText, "cannot embed blank text");
    }
    const bool truncated = text.size() > config_.max_chars;
    if (truncated) text = text.substr(0, config_.max_chars);
    const auto hash = sha256_hex(text);

    if (cache_) {
        if (auto hit = cache_->lookup(*config_.model_id, hash)) {
            if (hit->dim() != config_.dim) {
                throw Error(Errc::DimensionMismatch, "cached embedding has dim " + std::to_string(hit->dim()));
            }
            return {std::move(*hit), truncated, true};
        }
    }

    HttpRequest request;
    request.url = *config_.endpoint;
    request.timeout = config_.timeout;
    request.headers.emplace_back("Content-Type", "application/json");
    if (api_key_) request.headers.emplace_back("Authorization", "Bearer " + *api_key_);
    request.body = nlohmann::json{{"model", *config_.model_id}, {"input", std::string(text)}}.dump();

    const auto response = post_with_retries(*transport_, request, retry_);
    std::vector<double> values;
    try {
        values = nlohmann::json::parse(response.body).at("data").at(0).at("embedding").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ProviderUnavailable, std::string("malformed embedding response: ") + e.what());
    }
    if (values.size() != config_.dim) {
        throw Error(Errc::DimensionMismatch, "provider returned " + std::to_string(values.size()) +
                                                 " values, expected " + std::to_string(config_.dim));
    }
    if (config_.normalization == Normalization::L2) normalize_l2(values);
    EmbeddingVector vector(std::move(values));
    if (cache_) cache_->insert(*config_.model_id, hash, vector);
    return {std::move(vector), truncated, false};
}

std::string RemoteEmbedder::fingerprint() const {
    return "remote:" + *config_.model_id + ":dim=" + std::to_string(config_.dim) +
           ":norm=" + std::string(to_string(config_.normalization)) + ":max_chars=" + std::to_string(config_.max_chars);
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& config, std::shared_ptr<HttpTransport> transport) {
    config.validate();
    if (config.kind == EmbedderKind::HashedLocal) {
        return std::make_unique<HashedEmbedder>(config.dim, config.normalization);
    }
    std::optional<std::string> api_key;
    if (const char* key = std::getenv(kApiKeyEnv); key && *key) api_key = key;
    std::shared_ptr<EmbeddingCache> cache;
    if (config.cache_path) cache = std::make_shared<EmbeddingCache>(*config.cache_path);
    if (!transport) transport = make_http_transport();
    return std::make_unique<RemoteEmbedder>(config, std::move(transport), std::move(cache), std::move(api_key));
}

EmbeddingVector embed_text(std::string_view text, const EmbedderConfig& config) {
    return make_embedder(config)->embed(text);
}

}  // namespace lprotector
