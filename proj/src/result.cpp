#include "lprotector/result.hpp"

#include "lprotector/error.hpp"

namespace lprotector {

std::string_view to_string(ParseStatus status) noexcept {
    return status == ParseStatus::Parsed ? "parsed" : "fallback";
}

nlohmann::ordered_json to_json(const SampleResult& result, bool include_latency) {
    nlohmann::ordered_json doc;
    doc["sample_id"] = result.sample_id;
    doc["true_label"] = result.true_label ? nlohmann::ordered_json(*result.true_label) : nlohmann::ordered_json(nullptr);
    doc["predicted_label"] = result.predicted_label;
    doc["parse_status"] = to_string(result.parse_status);
    doc["verdict_retries"] = result.verdict_retries;
    if (result.retrieval) {
        auto hits = nlohmann::ordered_json::array();
        for (const auto& hit : *result.retrieval) {
            hits.push_back({{"entry_id", hit.entry_id}, {"score", hit.score}, {"rank", hit.rank}});
        }
        doc["retrieval"] = std::move(hits);
    }
    if (result.chosen_context) doc["chosen_context"] = *result.chosen_context;
    doc["rerank_fallback"] = result.rerank_fallback;
    if (include_latency) doc["latency_ms"] = result.latency.count();
    return doc;
}

SampleResult sample_result_from_json(const nlohmann::json& doc) {
    try {
        SampleResult result;
        result.sample_id = doc.at("sample_id").get<std::string>();
        if (!doc.at("true_label").is_null()) result.true_label = doc.at("true_label").get<int>();
        result.predicted_label = doc.at("predicted_label").get<int>();
        const auto status = doc.at("parse_status").get<std::string>();
        if (status == "parsed") {
            result.parse_status = ParseStatus::Parsed;
        } else if (status == "fallback") {
            result.parse_status = ParseStatus::Fallback;
        } else {
            throw Error(Errc::CorruptFile, "unknown parse_status '" + status + "'");
        }
        result.verdict_retries = doc.at("verdict_retries").get<int>();
        if (doc.contains("retrieval")) {
            std::vector<RetrievalHit> hits;
            for (const auto& hit : doc.at("retrieval")) {
                hits.push_back({hit.at("entry_id").get<std::string>(), hit.at("score").get<double>(),
                                hit.at("rank").get<std::size_t>()});
            }
            result.retrieval = std::move(hits);
        }
        if (doc.contains("chosen_context")) result.chosen_context = doc.at("chosen_context").get<std::string>();
        result.rerank_fallback = doc.at("rerank_fallback").get<bool>();
        if (doc.contains("latency_ms")) result.latency = std::chrono::milliseconds(doc.at("latency_ms").get<long>());
        if (result.predicted_label != 0 && result.predicted_label != 1) {
            throw Error(Errc::CorruptFile, "predicted_label must be 0 or 1");
        }
        return result;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::CorruptFile, std::string("sample result: ") + e.what());
    }
}

}  // namespace lprotector
