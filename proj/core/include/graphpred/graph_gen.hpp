#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "graphpred/feature_map.hpp"

namespace graphpred {

struct GeneratorParams {
    Eigen::Index n = 50;  // node count
    Eigen::Index T = 10;  // observed transitions; T+2 snapshots are emitted
    Eigen::Index r = 5;   // latent rank
    double sigma = 0.5;   // noise std-dev before thresholding
    double sparsity = 0.3;              // nonzero fraction of latent factors
    std::optional<double> noise_threshold{};  // default: 1.9 * sigma
    double spectral_target = 0.9;       // operator norm given to the transition
    /// Value scale of the initial latent state relative to the basis.
    double latent_scale = 5.0;
    /// Off-diagonal transition weight: 0 decays each feature in place,
    /// larger values rotate activity across features so the cumulative
    /// graph blurs while the autoregression stays predictive.
    double mixing = 0.5;
    std::uint64_t seed = 0;

    double resolved_noise_threshold() const {
        return noise_threshold.value_or(1.9 * sigma);
    }
    void validate() const;
};

/// A generated sequence with its ground truth. The last snapshot is the
/// held-out evaluation target; with sigma = 0 every snapshot equals
/// U_0 W_0^t V_0^T exactly.
struct SyntheticInstance {
    AdjacencySequence snapshots;               // A_0..A_{T+1}, T+2 entries
    Eigen::MatrixXd latent_basis;              // V_0, n x r
    Eigen::MatrixXd transition;                // W_0, r x r
    std::vector<Eigen::MatrixXd> latent_trajectory;  // U_0..U_{T+1}
    GeneratorParams params;

    /// Snapshots the methods may see: everything but the held-out target.
    AdjacencySequence observed() const {
        return AdjacencySequence(snapshots.begin(), snapshots.end() - 1);
    }
    const Eigen::MatrixXd& held_out() const { return snapshots.back(); }
};

/// Matrix of i.i.d. entries soft_threshold(g, threshold), g ~ N(0, sigma^2).
Eigen::MatrixXd sparse_noise(Eigen::Index rows, Eigen::Index cols, double sigma,
                             double threshold, std::mt19937_64& rng);

/// Draws sparse latent factors (Bernoulli(sparsity) mask on standard
/// normals), rescales the transition to the requested operator norm, then
/// rolls the recursion U_t = U_{t-1} W_0 + N_t, A_t = U_t V_0^T + M_t.
/// Deterministic given the seed. Throws std::runtime_error if a full-rank
/// latent basis cannot be drawn in 100 attempts.
SyntheticInstance generate(const GeneratorParams& params);

}  // namespace graphpred
