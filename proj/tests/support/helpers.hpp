#ifndef BRIDGED_TEST_HELPERS_HPP
#define BRIDGED_TEST_HELPERS_HPP

#include <filesystem>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "bridged/types.hpp"

namespace testing_util {

inline bridged::Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
    const auto n = static_cast<Eigen::Index>(values.size());
    const auto d = n ? static_cast<Eigen::Index>(values.begin()->size()) : 0;
    bridged::Matrix m(n, d);
    Eigen::Index i = 0;
    for (const auto& r : values) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

inline bridged::PointSet points(std::initializer_list<std::initializer_list<double>> values,
                                std::optional<bridged::Labels> latent = std::nullopt) {
    return bridged::PointSet(rows(values), {}, std::move(latent));
}

/// Isotropic blobs around `centers` (one row each), `per` points per blob.
inline bridged::PointSet blobs(const bridged::Matrix& centers, int per, double sigma, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    bridged::Matrix pts(centers.rows() * per, centers.cols());
    bridged::Labels lat;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        for (int i = 0; i < per; ++i) {
            const auto r = c * per + i;
            for (Eigen::Index j = 0; j < centers.cols(); ++j) pts(r, j) = centers(c, j) + noise(gen);
            lat.push_back(static_cast<int>(c));
        }
    }
    return bridged::PointSet(std::move(pts), {}, std::move(lat));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("bridged_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testing_util

#endif  // BRIDGED_TEST_HELPERS_HPP
