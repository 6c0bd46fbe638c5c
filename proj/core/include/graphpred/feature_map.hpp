#pragma once

#include <Eigen/Core>

#include <vector>

namespace graphpred {

/// Ordered graph snapshots, one n x n matrix per time step.
using AdjacencySequence = std::vector<Eigen::MatrixXd>;

enum class FeatureMapKind {
    explicit_basis,  // d Frobenius inner products against fixed basis matrices
    degree,          // row sums (node out-degrees), a 1 x n block
    svd_projection,  // right-multiplication by an orthonormal n x d matrix
    pseudoinverse,   // right-multiplication by the pseudo-inverse of a basis^T
};

/// Linear map from n x n graph matrices to m x d feature blocks, with its
/// adjoint. The feature autoregression reads F(A_{t+1}) ~ F(A_t) * W for a
/// d x d transition W; vector-valued features are the m = 1 case.
class FeatureMap {
public:
    /// Empty map; usable only after assigning one of the factory results.
    FeatureMap() = default;

    static FeatureMap make_explicit_basis(std::vector<Eigen::MatrixXd> basis);
    static FeatureMap make_degree(Eigen::Index n);
    /// `projection` must have orthonormal columns (n x d).
    static FeatureMap make_svd_projection(Eigen::MatrixXd projection);
    /// Features recover the latent factors of the generator: the map is
    /// A -> A * basis (basis^T basis)^{-1}. `latent_basis` must have full
    /// column rank.
    static FeatureMap make_pseudoinverse(const Eigen::MatrixXd& latent_basis);

    /// Feature block of an n x n matrix, shape m x d.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& a) const;
    /// Adjoint of `apply`: <apply(A), F> = <A, adjoint(F)> for all A, F.
    Eigen::MatrixXd adjoint(const Eigen::MatrixXd& f) const;

    FeatureMapKind kind() const { return kind_; }
    Eigen::Index n() const { return n_; }
    Eigen::Index feature_rows() const { return m_; }
    Eigen::Index feature_cols() const { return d_; }
    const std::vector<Eigen::MatrixXd>& basis() const { return basis_; }
    const Eigen::MatrixXd& projection() const { return projection_; }

private:
    FeatureMapKind kind_ = FeatureMapKind::degree;
    Eigen::Index n_ = 0, m_ = 0, d_ = 0;
    std::vector<Eigen::MatrixXd> basis_;  // explicit_basis only
    Eigen::MatrixXd projection_;          // svd_projection / pseudoinverse
};

/// Projection feature map onto the top-d right singular vectors of the
/// cumulative graph. Each column's sign is fixed so its largest-magnitude
/// entry is positive, making the map deterministic.
FeatureMap fit_svd_projection(const Eigen::MatrixXd& cumulative, Eigen::Index d);

/// Stacked feature blocks of a snapshot sequence A_0..A_T:
/// `prev` holds blocks of A_0..A_{T-1}, `next` those of A_1..A_T,
/// both (T*m) x d.
struct DesignPair {
    Eigen::MatrixXd prev;
    Eigen::MatrixXd next;
};

DesignPair build_design(const AdjacencySequence& seq, const FeatureMap& map);

}  // namespace graphpred
