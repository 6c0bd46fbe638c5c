#pragma once

#include <Eigen/Core>

#include <utility>

#include "graphpred/feature_map.hpp"

namespace graphpred {

/// Precomputed blocks both solvers consume: the stacked designs, the feature
/// block of the last observed snapshot, and the feature map itself.
struct ProblemData {
    Eigen::MatrixXd design_prev;    // (T*m) x d, features of A_0..A_{T-1}
    Eigen::MatrixXd design_next;    // (T*m) x d, features of A_1..A_T
    Eigen::MatrixXd last_features;  // m x d, features of A_T
    FeatureMap map;
    Eigen::Index n = 0;
    Eigen::Index d = 0;
    Eigen::Index T = 0;
    Eigen::MatrixXd cumulative;  // sum of observed snapshots; factorized init

    static ProblemData from_sequence(const AdjacencySequence& seq, FeatureMap map);

    Eigen::Index feature_rows() const { return map.feature_rows(); }
    void validate() const;
};

/// Regularization levels: tau on the trace norm of the graph estimate,
/// gamma on its l1 norm, kappa on the l1 norm of the transition. `alpha`
/// only enters the dual-certificate diagnostic; `rank` is used by the
/// factorized solver and the low-rank baseline.
struct Hyperparams {
    double tau = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    double alpha = 0.5;
    Eigen::Index rank = 0;

    void validate() const;
};

/// The joint linear map behind both objectives:
///   (S, W) -> (design_prev * W,  map(S) - last_features * W).
/// Also usable through the flattened-vector interface expected by
/// operator_norm (domain [vec(S); vec(W)], column-major).
struct DesignOperator {
    const ProblemData* data;

    explicit DesignOperator(const ProblemData& d) : data(&d) {}

    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> apply_blocks(
        const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) const;
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> adjoint_blocks(
        const Eigen::MatrixXd& block1, const Eigen::MatrixXd& block2) const;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd adjoint(const Eigen::VectorXd& y) const;
    Eigen::Index domain_dim() const;
    Eigen::Index codomain_dim() const;
};

/// Convex objective: scaled squared residuals of the feature autoregression
/// and of the graph prediction, plus trace-norm and l1 penalties.
double convex_objective(const ProblemData& data, const Hyperparams& params,
                        const Eigen::MatrixXd& s, const Eigen::MatrixXd& w);

/// Gradient of the smooth (quadratic) part of the convex objective.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> smooth_gradient(
    const ProblemData& data, const Eigen::MatrixXd& s, const Eigen::MatrixXd& w);

/// Non-convex objective on the factorization S = U V^T with l1 penalties on
/// both factors instead of the trace norm.
double factored_objective(const ProblemData& data, const Hyperparams& params,
                          const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                          const Eigen::MatrixXd& w);

/// Chain-rule gradient of the smooth part of the factored objective.
struct FactoredGradient {
    Eigen::MatrixXd u;
    Eigen::MatrixXd v;
    Eigen::MatrixXd w;
};

FactoredGradient factored_smooth_gradient(const ProblemData& data,
                                          const Eigen::MatrixXd& u,
                                          const Eigen::MatrixXd& v,
                                          const Eigen::MatrixXd& w);

/// Noise functionals available in synthetic mode, where the true transition
/// and the next snapshot are known. Their norms calibrate the regularization
/// levels; the pair (graph_certificate, transition_certificate) is the
/// adjoint image of the two residuals, so
///   <(residuals), Op(S, W)> == <(certificates), (S, W)>  for all S, W.
struct DualCertificates {
    Eigen::MatrixXd design_residual;          // (T*m) x d
    Eigen::MatrixXd forecast_residual;        // m x d
    Eigen::MatrixXd graph_certificate;        // n x n
    Eigen::MatrixXd transition_certificate;   // d x d
    double suggested_tau = 0.0;
    double suggested_gamma = 0.0;
    double suggested_kappa = 0.0;
};

DualCertificates dual_certificates(const ProblemData& data,
                                   const Eigen::MatrixXd& true_transition,
                                   const Eigen::MatrixXd& next_snapshot,
                                   double alpha = 0.5);

}  // namespace graphpred
