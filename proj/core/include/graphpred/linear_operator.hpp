#pragma once

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "graphpred/rng.hpp"

namespace graphpred {

/// Anything that can act on flattened vectors together with its adjoint.
template <class Op>
concept LinearOperatorLike = requires(const Op& op, const Eigen::VectorXd& v) {
    { op.apply(v) } -> std::convertible_to<Eigen::VectorXd>;
    { op.adjoint(v) } -> std::convertible_to<Eigen::VectorXd>;
    { op.domain_dim() } -> std::convertible_to<Eigen::Index>;
    { op.codomain_dim() } -> std::convertible_to<Eigen::Index>;
};

/// A dense matrix viewed as a linear operator.
struct DenseOperator {
    Eigen::MatrixXd matrix;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return matrix * x; }
    Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const {
        return matrix.transpose() * y;
    }
    Eigen::Index domain_dim() const { return matrix.cols(); }
    Eigen::Index codomain_dim() const { return matrix.rows(); }
};

struct PowerIterationError : std::runtime_error {
    double last_estimate;
    PowerIterationError(const std::string& what, double estimate)
        : std::runtime_error(what), last_estimate(estimate) {}
};

/// Largest singular value by power iteration on adjoint(apply(.)).
/// The start vector is drawn from the seeded generator, so results are
/// reproducible. Stops when successive estimates agree to `tol` relative;
/// throws PowerIterationError (carrying the last estimate) if max_iters
/// iterations are not enough.
template <LinearOperatorLike Op>
double operator_norm(const Op& op, int max_iters = 5000, double tol = 1e-8,
                     std::uint64_t seed = 0) {
    const Eigen::Index dim = op.domain_dim();
    if (dim == 0) return 0.0;

    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    double estimate = 0.0;
    for (int restart = 0; restart < 3; ++restart) {
        Eigen::VectorXd v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = gaussian(gen);
        const double vn = v.norm();
        if (vn == 0.0) continue;
        v /= vn;

        double prev = -1.0;
        for (int it = 0; it < max_iters; ++it) {
            const Eigen::VectorXd image = op.apply(v);
            estimate = image.norm();  // ||A v|| with ||v|| = 1
            if (estimate == 0.0) break;
            if (prev >= 0.0 && std::abs(estimate - prev) <= tol * estimate)
                return estimate;
            prev = estimate;
            Eigen::VectorXd pulled = op.adjoint(image);
            const double pn = pulled.norm();
            if (pn == 0.0) return estimate;
            v = pulled / pn;
        }
        if (estimate > 0.0)
            throw PowerIterationError(
                "operator_norm: no convergence within " +
                    std::to_string(max_iters) + " iterations",
                estimate);
        // image vanished: either the operator is zero or the start vector was
        // unlucky; retry with a fresh start.
    }
    return 0.0;
}

}  // namespace graphpred
