#ifndef NEWSLENS_TESTUTIL_HPP
#define NEWSLENS_TESTUTIL_HPP

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

inline std::filesystem::path source_dir() { return {NEWSLENS_SOURCE_DIR}; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }

// Scratch directory, unique per tag, wiped on construction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("newslens_test_" + tag);
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

// Engine-only randomness: std::mt19937_64 output is pinned by the standard,
// while distribution objects are not, so tests derive everything from raw
// 64-bit draws to stay reproducible across toolchains.
inline double u01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline bool bernoulli(std::mt19937_64& rng, double p) { return u01(rng) < p; }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {  // inclusive
    return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

}  // namespace testutil

#endif  // NEWSLENS_TESTUTIL_HPP
