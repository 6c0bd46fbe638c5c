#include "graphpred/graph_gen.hpp"

#include <stdexcept>
#include <utility>

#include "graphpred/matrix_kernels.hpp"
#include "graphpred/rng.hpp"

namespace graphpred {

void GeneratorParams::validate() const {
    if (r < 1 || n < r)
        throw std::invalid_argument("GeneratorParams: need n >= r >= 1");
    if (T < 1) throw std::invalid_argument("GeneratorParams: need T >= 1");
    if (sigma < 0.0) throw std::invalid_argument("GeneratorParams: sigma < 0");
    if (!(sparsity > 0.0 && sparsity <= 1.0))
        throw std::invalid_argument("GeneratorParams: sparsity must be in (0, 1]");
    if (noise_threshold && *noise_threshold < 0.0)
        throw std::invalid_argument("GeneratorParams: noise_threshold < 0");
    if (!(spectral_target > 0.0 && spectral_target < 1.0))
        throw std::invalid_argument(
            "GeneratorParams: spectral_target must be in (0, 1)");
    if (!(latent_scale > 0.0))
        throw std::invalid_argument("GeneratorParams: latent_scale must be positive");
    if (mixing < 0.0)
        throw std::invalid_argument("GeneratorParams: mixing must be >= 0");
}

Eigen::MatrixXd sparse_noise(Eigen::Index rows, Eigen::Index cols, double sigma,
                             double threshold, std::mt19937_64& rng) {
    if (sigma < 0.0 || threshold < 0.0)
        throw std::invalid_argument("sparse_noise: sigma and threshold must be >= 0");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    if (sigma == 0.0) return out;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double g = sigma * gaussian(rng);
            const double mag = std::abs(g) - threshold;
            out(i, j) = mag > 0.0 ? (g > 0.0 ? mag : -mag) : 0.0;
        }
    }
    return out;
}

namespace {

// Sparse nonnegative factors with a Bernoulli support mask; active entries
// are shifted half-normals, so link weights stay bounded away from zero and
// the ranking margins are not dominated by vanishing factor products.
Eigen::MatrixXd sparse_factor(Eigen::Index rows, Eigen::Index cols, double sparsity,
                              double scale, std::mt19937_64& rng) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j)
            if (uniform01(rng) < sparsity)
                out(i, j) = scale * (0.5 + std::abs(gaussian(rng)));
    return out;
}

}  // namespace

SyntheticInstance generate(const GeneratorParams& params) {
    params.validate();
    std::mt19937_64 rng(params.seed);
    const double threshold = params.resolved_noise_threshold();
    constexpr int max_attempts = 100;

    SyntheticInstance inst;
    inst.params = params;

    // latent basis must have full column rank so its pseudo-inverse exists
    int attempt = 0;
    for (;; ++attempt) {
        if (attempt == max_attempts)
            throw std::runtime_error(
                "generate: latent basis stayed rank deficient after 100 draws");
        inst.latent_basis =
            sparse_factor(params.n, params.r, params.sparsity, 1.0, rng);
        if (compute_svd(inst.latent_basis).rank() == params.r) break;
    }

    Eigen::MatrixXd u0 = sparse_factor(params.n, params.r, params.sparsity,
                                       params.latent_scale, rng);

    // transition: every feature persists in place (unit diagonal) while a
    // sparse off-diagonal part rotates activity across features; the
    // off-diagonal rate is chosen so the overall nonzero fraction matches
    // `sparsity` whenever sparsity * r >= 1
    const double off_rate =
        params.r > 1 ? std::max(0.0, (params.sparsity * static_cast<double>(params.r) -
                                      1.0) /
                                         static_cast<double>(params.r - 1))
                     : 0.0;
    inst.transition = Eigen::MatrixXd::Zero(params.r, params.r);
    for (Eigen::Index i = 0; i < params.r; ++i)
        for (Eigen::Index j = 0; j < params.r; ++j) {
            if (i == j)
                inst.transition(i, j) = 1.0;
            else if (uniform01(rng) < off_rate)
                inst.transition(i, j) =
                    params.mixing * (0.5 + std::abs(gaussian(rng)));
        }
    inst.transition *= params.spectral_target / spectral_norm(inst.transition);

    inst.latent_trajectory.reserve(static_cast<std::size_t>(params.T) + 2);
    inst.snapshots.reserve(static_cast<std::size_t>(params.T) + 2);
    inst.latent_trajectory.push_back(std::move(u0));
    inst.snapshots.push_back(
        inst.latent_trajectory.back() * inst.latent_basis.transpose() +
        sparse_noise(params.n, params.n, params.sigma, threshold, rng));
    for (Eigen::Index t = 1; t <= params.T + 1; ++t) {
        Eigen::MatrixXd latent =
            inst.latent_trajectory.back() * inst.transition +
            sparse_noise(params.n, params.r, params.sigma, threshold, rng);
        inst.snapshots.push_back(
            latent * inst.latent_basis.transpose() +
            sparse_noise(params.n, params.n, params.sigma, threshold, rng));
        inst.latent_trajectory.push_back(std::move(latent));
    }
    return inst;
}

}  // namespace graphpred
