#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphpred/objectives.hpp"

namespace graphpred {

struct SolverConfig {
    /// Step size; unset selects auto_step(data).
    std::optional<double> step{};
    int max_iters = 20000;
    /// Stop when |obj_k - obj_{k-1}| / max(1, obj_{k-1}) drops below this.
    /// The splitting solver additionally requires its per-iteration updates
    /// to fall below 10 * rel_tol * (1 + ||S||_F) before declaring
    /// convergence.
    double rel_tol = 1e-7;
    std::uint64_t seed = 0;

    /// Proximable terms split off the graph variable (trace norm and l1).
    static constexpr int num_prox_terms = 2;
};

struct SolverResult {
    Eigen::MatrixXd predicted_graph;  // n x n estimate of the next snapshot
    Eigen::MatrixXd transition;       // d x d feature transition estimate
    Eigen::MatrixXd left_factor;      // n x r, factorized solver only
    Eigen::MatrixXd right_factor;     // n x r, factorized solver only
    std::vector<double> objective_trace;  // value at init, then per iteration
    int iterations = 0;
    bool converged = false;
    /// Frobenius norms of the last iteration's auxiliary/transition updates,
    /// summed; a fixed-point residual usable as an optimality proxy.
    double fixed_point_residual = 0.0;
};

struct DivergenceError : std::runtime_error {
    int iteration;
    DivergenceError(const std::string& what, int iter)
        : std::runtime_error(what), iteration(iter) {}
};

/// Safe step size 0.9 * d / ||Op||^2 where Op is the joint design operator.
/// The smooth part's gradient has Lipschitz constant (2/d) * ||Op||^2, so
/// this sits at 1.8 / L, inside the < 2/L stability range of the splitting
/// scheme with a margin that absorbs power-iteration error. Returns 1.0 for
/// an all-zero operator.
double auto_step(const ProblemData& data, std::uint64_t seed = 0);

struct WarmStart {
    Eigen::MatrixXd graph;       // initial S (auxiliaries start here too)
    Eigen::MatrixXd transition;  // initial W
};

/// Generalized forward-backward splitting on the convex objective. Two
/// auxiliary copies of the graph variable absorb the trace-norm and l1
/// proximal steps; the transition variable takes plain proximal-gradient
/// steps. Cold start is all zeros.
SolverResult solve_gfb(const ProblemData& data, const Hyperparams& params,
                       const SolverConfig& config = {},
                       const std::optional<WarmStart>& warm = {});

struct FactorizedInit {
    Eigen::MatrixXd left;        // U, n x r
    Eigen::MatrixXd right;       // V, n x r
    Eigen::MatrixXd transition;  // W, d x d
};

/// Proximal gradient descent on the factored objective. Default
/// initialization takes the rank-r truncated SVD of the cumulative graph,
/// splitting the singular values evenly between the two factors.
SolverResult solve_factorized(const ProblemData& data, const Hyperparams& params,
                              Eigen::Index rank, const SolverConfig& config = {},
                              const std::optional<FactorizedInit>& init = {});

}  // namespace graphpred
