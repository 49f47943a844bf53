#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "wardwatt/timestamp.hpp"

namespace wardwatt::test {

inline Instant at(const char* text) { return *parse_instant(text); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& name) : path_(std::filesystem::temp_directory_path() / ("wardwatt_" + name)) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& file, const std::string& text) const {
        std::ofstream(path_ / file) << text;
        return path_ / file;
    }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace wardwatt::test
