#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "lprotector/corpus.hpp"

namespace lprotector {

/// Generates a labeled corpus of small C functions. Vulnerable functions carry
/// planted unsafe idioms (unbounded string copies, format strings, unchecked
/// memcpy lengths, use after free, shell command construction, unchecked
/// allocation sizes); clean functions are ordinary bounded code. Ids are
/// "vul-NNNN" and "clean-NNNN". Deterministic in `seed`.
std::vector<CodeSample> make_planted_corpus(std::size_t n_vulnerable, std::size_t n_clean, std::uint64_t seed);

/// Writes samples as CSV using the default Big-Vul column names plus an "id"
/// column.
void write_corpus_csv(std::span<const CodeSample> samples, const std::filesystem::path& path);

}  // namespace lprotector
