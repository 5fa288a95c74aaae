#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "chanstat/types.hpp"

namespace testutil {

using chanstat::CMat;
using chanstat::RMat;
using chanstat::cplx;

inline CMat random_cmat(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CMat out(rows, cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = cplx(gauss(rng), gauss(rng));
    }
    return out;
}

inline RMat random_rmat(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    RMat out(rows, cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.data()[i] = unit(rng);
    }
    return out;
}

inline double max_abs_diff(const RMat& a, const RMat& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

inline double max_rel_diff(const RMat& a, const RMat& b) {
    double scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        scale = std::max(scale, std::abs(a.data()[i]));
    }
    if (scale == 0.0) {
        return max_abs_diff(a, b);
    }
    return max_abs_diff(a, b) / scale;
}

// Unique scratch directory under the system temp root, removed on
// destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        const auto base = std::filesystem::temp_directory_path();
        path_ = base / ("chanstat_test_" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
