#include "lprotector/vstore.hpp"

#include "lprotector/error.hpp"
#include "lprotector/support.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

namespace lprotector {

namespace {

constexpr int kFormatVersion = 1;

nlohmann::ordered_json optional_json(const std::optional<std::string>& value) {
    return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

std::optional<std::string> optional_string(const nlohmann::json& doc, const char* key) {
    const auto& value = doc.at(key);
    if (value.is_null()) return std::nullopt;
    return value.get<std::string>();
}

}  // namespace

VectorStore VectorStore::build(std::vector<KnowledgeEntry> entries, std::size_t dim) {
    VectorStore store;
    store.dim_ = dim;
    std::unordered_set<std::string> ids;
    for (const auto& entry : entries) {
        if (!ids.insert(entry.id).second) {
            throw Error(Errc::DuplicateId, "knowledge entry id '" + entry.id + "' is not unique");
        }
        if (store.dim_ == 0) {
            store.dim_ = entry.embedding.dim();
        } else if (entry.embedding.dim() != store.dim_) {
            throw Error(Errc::DimensionMismatch, "entry '" + entry.id + "' has dim " +
                                                     std::to_string(entry.embedding.dim()) + ", store has " +
                                                     std::to_string(store.dim_));
        }
    }
    store.norms_.reserve(entries.size());
    for (const auto& entry : entries) store.norms_.push_back(entry.embedding.norm());
    store.entries_ = std::move(entries);
    return store;
}

const KnowledgeEntry* VectorStore::find(const std::string& id) const {
    auto it = std::find_if(entries_.begin(), entries_.end(), [&](const KnowledgeEntry& e) { return e.id == id; });
    return it == entries_.end() ? nullptr : &*it;
}

void VectorStore::check_query(const EmbeddingVector& query) const {
    if (dim_ != 0 && query.dim() != dim_) {
        throw Error(Errc::DimensionMismatch,
                    "query has dim " + std::to_string(query.dim()) + ", store has " + std::to_string(dim_));
    }
}

std::vector<RetrievalHit> VectorStore::top_k(const EmbeddingVector& query, std::size_t k) const {
    if (k == 0) {
        throw Error(Errc::InvalidInput, "top_k needs k >= 1");
    }
    check_query(query);
    if (entries_.empty()) return {};
    const double query_norm = query.norm();
    if (query_norm == 0.0) {
        throw Error(Errc::ZeroVector, "query embedding is the zero vector");
    }

    std::vector<double> scores(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (norms_[i] == 0.0) {
            throw Error(Errc::ZeroVector, "entry '" + entries_[i].id + "' has a zero embedding");
        }
        const auto values = entries_[i].embedding.values();
        double dot = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) dot += query[d] * values[d];
        scores[i] = std::clamp(dot / (query_norm * norms_[i]), -1.0, 1.0);
    }

    std::vector<std::size_t> order(entries_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto take = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return entries_[a].id < entries_[b].id;
                      });

    std::vector<RetrievalHit> hits;
    hits.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
        hits.push_back({entries_[order[r]].id, scores[order[r]], r + 1});
    }
    return hits;
}

NearestHit VectorStore::nearest(const EmbeddingVector& query) const {
    if (entries_.empty()) {
        throw Error(Errc::EmptyStore, "nearest-neighbour query on an empty store");
    }
    check_query(query);
    std::size_t best = 0;
    double best_sq = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto values = entries_[i].embedding.values();
        double sq = 0.0;
        for (std::size_t d = 0; d < dim_; ++d) {
            const double diff = query[d] - values[d];
            sq += diff * diff;
        }
        if (sq < best_sq || (sq == best_sq && entries_[i].id < entries_[best].id)) {
            best = i;
            best_sq = sq;
        }
    }
    return {entries_[best].id, std::sqrt(best_sq)};
}

std::string VectorStore::serialize_entries() const {
    std::string body;
    for (const auto& entry : entries_) {
        nlohmann::ordered_json line;
        line["id"] = entry.id;
        line["cwe_id"] = optional_json(entry.cwe_id);
        line["vuln_name"] = optional_json(entry.vuln_name);
        line["description"] = optional_json(entry.description);
        line["code"] = entry.code;
        line["embedding"] = std::vector<double>(entry.embedding.values().begin(), entry.embedding.values().end());
        body += line.dump();
        body += '\n';
    }
    return body;
}

std::uint64_t VectorStore::checksum() const { return fnv1a64(serialize_entries()); }

std::string VectorStore::serialize() const {
    const auto body = serialize_entries();
    nlohmann::ordered_json header;
    header["version"] = kFormatVersion;
    header["dim"] = dim_;
    header["count"] = entries_.size();
    header["checksum"] = hex64(fnv1a64(body));
    return header.dump() + "\n" + body;
}

void VectorStore::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

VectorStore VectorStore::deserialize(const std::string& contents) {
    const auto header_end = contents.find('\n');
    if (header_end == std::string::npos) {
        throw Error(Errc::CorruptFile, "store file has no header line");
    }
    const std::string_view body = std::string_view(contents).substr(header_end + 1);
    std::size_t dim = 0;
    std::size_t count = 0;
    try {
        const auto header = nlohmann::json::parse(contents.substr(0, header_end));
        if (header.at("version").get<int>() != kFormatVersion) {
            throw Error(Errc::CorruptFile, "unsupported store version");
        }
        dim = header.at("dim").get<std::size_t>();
        count = header.at("count").get<std::size_t>();
        if (header.at("checksum").get<std::string>() != hex64(fnv1a64(body))) {
            throw Error(Errc::CorruptFile, "store checksum mismatch");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::CorruptFile, std::string("store header: ") + e.what());
    }

    std::vector<KnowledgeEntry> entries;
    entries.reserve(count);
    std::size_t pos = 0;
    while (pos < body.size()) {
        auto end = body.find('\n', pos);
        if (end == std::string_view::npos) {
            throw Error(Errc::CorruptFile, "store entry line is not newline terminated");
        }
        try {
            const auto doc = nlohmann::json::parse(body.substr(pos, end - pos));
            entries.push_back(KnowledgeEntry{
                doc.at("id").get<std::string>(),
                optional_string(doc, "cwe_id"),
                optional_string(doc, "vuln_name"),
                optional_string(doc, "description"),
                doc.at("code").get<std::string>(),
                EmbeddingVector(doc.at("embedding").get<std::vector<double>>()),
            });
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::CorruptFile, "store entry " + std::to_string(entries.size() + 1) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(Errc::CorruptFile, "store entry " + std::to_string(entries.size() + 1) + ": " + e.what());
        }
        pos = end + 1;
    }
    if (entries.size() != count) {
        throw Error(Errc::CorruptFile,
                    "header declares " + std::to_string(count) + " entries, file has " + std::to_string(entries.size()));
    }
    try {
        return build(std::move(entries), dim);
    } catch (const Error& e) {
        throw Error(Errc::CorruptFile, e.what());
    }
}

VectorStore VectorStore::load(const std::filesystem::path& path) { return deserialize(read_file(path)); }

}  // namespace lprotector
