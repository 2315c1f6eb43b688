#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>

namespace lprotector {

inline constexpr std::uint64_t kFnvOffsetBasis = 14695981039346656037ULL;
inline constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

/// 64-bit FNV-1a. Pass a previous result as `state` to hash incrementally.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = kFnvOffsetBasis) noexcept {
    for (unsigned char c : bytes) {
        state ^= c;
        state *= kFnvPrime;
    }
    return state;
}

/// Lower-case, zero-padded 16 digit hex.
std::string hex64(std::uint64_t value);

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);
/// SHA-256 of a file's contents, streamed.
std::string sha256_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
/// Writes through a sibling temp file and renames it into place.
void write_file(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view text) noexcept;
bool is_blank(std::string_view text) noexcept;
std::string to_lower(std::string_view text);

/// Uniform integer in [0, bound) drawn from a 64-bit engine by rejection.
/// Unlike std::uniform_int_distribution the result sequence is identical on
/// every standard library.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

}  // namespace lprotector
