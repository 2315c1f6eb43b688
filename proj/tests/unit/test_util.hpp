#pragma once

#include "lprotector/error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#define EXPECT_ERRC(statement, expected)                                                   \
    do {                                                                                   \
        try {                                                                              \
            statement;                                                                     \
            ADD_FAILURE() << "expected Error " << ::lprotector::to_string(expected);       \
        } catch (const ::lprotector::Error& e) {                                           \
            EXPECT_EQ(e.code(), expected) << e.what();                                     \
        }                                                                                  \
    } while (false)

namespace lprotector::testing {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(LPROTECTOR_FIXTURES) / name;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        path_ = std::filesystem::temp_directory_path() /
                (std::string("lprotector_") + info->test_suite_name() + "_" + info->name());
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace lprotector::testing
