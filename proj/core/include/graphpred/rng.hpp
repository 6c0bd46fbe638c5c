#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace graphpred {

/// Uniform draw in [0, 1) built from the top 53 bits of the generator.
/// Avoids std::uniform_real_distribution so streams are identical across
/// standard libraries.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal draw via Box-Muller on explicit uniform bits.
inline double gaussian(std::mt19937_64& gen) {
    const double u = 1.0 - uniform01(gen);  // (0, 1], keeps log finite
    const double v = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

/// Unbiased integer in [0, bound) (Lemire multiply-shift with rejection).
inline std::uint64_t bounded_int(std::mt19937_64& gen, std::uint64_t bound) {
    using u128 = unsigned __int128;
    std::uint64_t x = gen();
    u128 m = static_cast<u128>(x) * bound;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            x = gen();
            m = static_cast<u128>(x) * bound;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols,
                                       std::mt19937_64& gen) {
    Eigen::MatrixXd out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = gaussian(gen);
    return out;
}

}  // namespace graphpred
