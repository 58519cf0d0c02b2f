#pragma once

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "cartometry/error.hpp"

namespace carto::testing {

inline std::filesystem::path golden(const std::string& name) {
    return std::filesystem::path(CARTOMETRY_GOLDEN_DIR) / name;
}

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void spit(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path, std::ios::binary) << text;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("cartometry-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

    // Copies a golden file in and returns the new path.
    std::filesystem::path copy(const std::string& name, const std::string& as = {}) const {
        const auto dst = path_ / (as.empty() ? name : as);
        std::filesystem::copy_file(golden(name), dst,
                                   std::filesystem::copy_options::overwrite_existing);
        return dst;
    }

private:
    std::filesystem::path path_;
};

// Runs `fn` and returns the code of the carto::Error it throws.
template <class Fn>
ErrorCode error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected carto::Error";
    return ErrorCode::invalid_input;
}

}  // namespace carto::testing
