#pragma once

#include <Eigen/Core>

namespace graphpred {

/// Thin SVD of a rows x cols matrix: U diag(singular_values) V^T.
/// Columns of U and V are orthonormal, singular values nonincreasing,
/// k = min(rows, cols).
struct SvdFactors {
    Eigen::MatrixXd U;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd V;

    /// Numerical rank: singular values above rel_tol * sigma_max.
    Eigen::Index rank(double rel_tol = 1e-8) const;
};

/// Entrywise shrink-toward-zero: sgn(z) * max(|z| - gamma, 0).
/// Proximal operator of gamma * l1-norm. Ties |z| == gamma map to 0.
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& z, double gamma);

/// Singular value shrinkage U diag((sigma_i - tau)+) V^T.
/// Proximal operator of tau * trace norm; never increases rank.
Eigen::MatrixXd svd_shrink(const Eigen::MatrixXd& z, double tau);

/// Thin SVD with validated reconstruction. Throws std::invalid_argument on
/// non-finite input and std::runtime_error when the factorization fails.
SvdFactors compute_svd(const Eigen::MatrixXd& z);

/// Sum of singular values.
double nuclear_norm(const Eigen::MatrixXd& z);

/// Sum of absolute entries.
inline double l1_norm(const Eigen::MatrixXd& z) { return z.cwiseAbs().sum(); }

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& z);

/// Projection onto the tangent cone of the low-rank reference behind
/// `factors`: B - P_{U_perp} B P_{V_perp}. Idempotent. The reference rank is
/// the numerical rank of the stored singular values.
Eigen::MatrixXd project_tangent(const Eigen::MatrixXd& b, const SvdFactors& factors);

/// B split against the column/row spaces (U, V) of a reference matrix.
/// The four blocks sum to B and are pairwise orthogonal.
struct FourBlockDecomposition {
    Eigen::MatrixXd uperp_vperp;  // P_{U_perp} B P_{V_perp}
    Eigen::MatrixXd u_v;          // P_U B P_V
    Eigen::MatrixXd u_vperp;      // P_U B P_{V_perp}
    Eigen::MatrixXd uperp_v;      // P_{U_perp} B P_V
};

FourBlockDecomposition four_block_decomposition(const Eigen::MatrixXd& b,
                                                const SvdFactors& factors);

}  // namespace graphpred
