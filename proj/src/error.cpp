#include "lprotector/error.hpp"

namespace lprotector {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
        case Errc::MissingFile: return "MissingFile";
        case Errc::MissingColumn: return "MissingColumn";
        case Errc::EmptyCorpus: return "EmptyCorpus";
        case Errc::DuplicateId: return "DuplicateId";
        case Errc::InsufficientClass: return "InsufficientClass";
        case Errc::NoVulnerableSamples: return "NoVulnerableSamples";
        case Errc::EmptyText: return "EmptyText";
        case Errc::ZeroVector: return "ZeroVector";
        case Errc::DimensionMismatch: return "DimensionMismatch";
        case Errc::EmptyStore: return "EmptyStore";
        case Errc::CorruptFile: return "CorruptFile";
        case Errc::EmptyCode: return "EmptyCode";
        case Errc::EmptyCandidates: return "EmptyCandidates";
        case Errc::ParseFailure: return "ParseFailure";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::EmptyCounts: return "EmptyCounts";
        case Errc::EmptyTestSet: return "EmptyTestSet";
        case Errc::InvalidInput: return "InvalidInput";
        case Errc::InvalidConfig: return "InvalidConfig";
        case Errc::ProviderUnavailable: return "ProviderUnavailable";
        case Errc::Timeout: return "Timeout";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

InsufficientClassError::InsufficientClassError(int label, std::size_t have, std::size_t need)
    : Error(Errc::InsufficientClass,
            "label " + std::to_string(label) + " has " + std::to_string(have) + " samples, need " +
                std::to_string(need)),
      label_(label),
      have_(have),
      need_(need) {}

bool is_transport_error(Errc code) noexcept {
    return code == Errc::ProviderUnavailable || code == Errc::Timeout;
}

}  // namespace lprotector
