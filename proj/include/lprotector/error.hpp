#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lprotector {

/// Every failure the library reports carries one of these codes. The CLI maps
/// them onto exit codes.
enum class Errc {
    MissingFile,
    MissingColumn,
    EmptyCorpus,
    DuplicateId,
    InsufficientClass,
    NoVulnerableSamples,
    EmptyText,
    ZeroVector,
    DimensionMismatch,
    EmptyStore,
    CorruptFile,
    EmptyCode,
    EmptyCandidates,
    ParseFailure,
    OutOfRange,
    EmptyCounts,
    EmptyTestSet,
    InvalidInput,
    InvalidConfig,
    ProviderUnavailable,
    Timeout,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// Raised by balanced_sample when a label stratum is too small.
class InsufficientClassError : public Error {
public:
    InsufficientClassError(int label, std::size_t have, std::size_t need);

    int label() const noexcept { return label_; }
    std::size_t have() const noexcept { return have_; }
    std::size_t need() const noexcept { return need_; }

private:
    int label_;
    std::size_t have_;
    std::size_t need_;
};

/// True for failures of a remote service, as opposed to bad input.
bool is_transport_error(Errc code) noexcept;

}  // namespace lprotector
