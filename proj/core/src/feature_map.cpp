#include "graphpred/feature_map.hpp"

#include <Eigen/Cholesky>

#include <stdexcept>
#include <string>
#include <utility>

#include "graphpred/matrix_kernels.hpp"

namespace graphpred {

namespace {

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

FeatureMap FeatureMap::make_explicit_basis(std::vector<Eigen::MatrixXd> basis) {
    require(!basis.empty(), "FeatureMap: empty basis");
    const Eigen::Index n = basis.front().rows();
    for (const auto& omega : basis)
        require(omega.rows() == n && omega.cols() == n,
                "FeatureMap: basis matrices must all be n x n");
    FeatureMap map;
    map.kind_ = FeatureMapKind::explicit_basis;
    map.n_ = n;
    map.m_ = 1;
    map.d_ = static_cast<Eigen::Index>(basis.size());
    map.basis_ = std::move(basis);
    return map;
}

FeatureMap FeatureMap::make_degree(Eigen::Index n) {
    require(n >= 1, "FeatureMap: n must be positive");
    FeatureMap map;
    map.kind_ = FeatureMapKind::degree;
    map.n_ = n;
    map.m_ = 1;
    map.d_ = n;
    return map;
}

FeatureMap FeatureMap::make_svd_projection(Eigen::MatrixXd projection) {
    require(projection.rows() >= projection.cols() && projection.cols() >= 1,
            "FeatureMap: projection must be n x d with d <= n");
    const Eigen::Index d = projection.cols();
    const Eigen::MatrixXd gram = projection.transpose() * projection;
    require((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-8,
            "FeatureMap: projection columns must be orthonormal");
    FeatureMap map;
    map.kind_ = FeatureMapKind::svd_projection;
    map.n_ = projection.rows();
    map.m_ = projection.rows();
    map.d_ = d;
    map.projection_ = std::move(projection);
    return map;
}

FeatureMap FeatureMap::make_pseudoinverse(const Eigen::MatrixXd& latent_basis) {
    require(latent_basis.rows() >= latent_basis.cols() && latent_basis.cols() >= 1,
            "FeatureMap: latent basis must be n x r with r <= n");
    const Eigen::Index r = latent_basis.cols();
    const Eigen::MatrixXd gram = latent_basis.transpose() * latent_basis;
    // P = V0 (V0^T V0)^{-1}, so that V0^T P = I_r
    const Eigen::MatrixXd p =
        gram.ldlt().solve(latent_basis.transpose()).transpose();
    require((latent_basis.transpose() * p - Eigen::MatrixXd::Identity(r, r))
                    .cwiseAbs()
                    .maxCoeff() < 1e-6,
            "FeatureMap: latent basis is rank deficient");
    FeatureMap map;
    map.kind_ = FeatureMapKind::pseudoinverse;
    map.n_ = latent_basis.rows();
    map.m_ = latent_basis.rows();
    map.d_ = r;
    map.projection_ = p;
    return map;
}

Eigen::MatrixXd FeatureMap::apply(const Eigen::MatrixXd& a) const {
    require(a.rows() == n_ && a.cols() == n_,
            "FeatureMap::apply: expected an n x n matrix");
    switch (kind_) {
        case FeatureMapKind::explicit_basis: {
            Eigen::MatrixXd f(1, d_);
            for (Eigen::Index i = 0; i < d_; ++i)
                f(0, i) = basis_[static_cast<std::size_t>(i)].cwiseProduct(a).sum();
            return f;
        }
        case FeatureMapKind::degree:
            return a.rowwise().sum().transpose();  // 1 x n
        case FeatureMapKind::svd_projection:
        case FeatureMapKind::pseudoinverse:
            return a * projection_;  // n x d
    }
    throw std::logic_error("FeatureMap::apply: unreachable");
}

Eigen::MatrixXd FeatureMap::adjoint(const Eigen::MatrixXd& f) const {
    require(f.rows() == m_ && f.cols() == d_,
            "FeatureMap::adjoint: expected an m x d feature block");
    switch (kind_) {
        case FeatureMapKind::explicit_basis: {
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
            for (Eigen::Index i = 0; i < d_; ++i)
                a += f(0, i) * basis_[static_cast<std::size_t>(i)];
            return a;
        }
        case FeatureMapKind::degree:
            // <degree(A), f> = sum_j f_j sum_k A_jk, so the adjoint spreads
            // f_j across row j
            return f.transpose() * Eigen::RowVectorXd::Ones(n_);
        case FeatureMapKind::svd_projection:
        case FeatureMapKind::pseudoinverse:
            return f * projection_.transpose();
    }
    throw std::logic_error("FeatureMap::adjoint: unreachable");
}

FeatureMap fit_svd_projection(const Eigen::MatrixXd& cumulative, Eigen::Index d) {
    require(cumulative.rows() == cumulative.cols(),
            "fit_svd_projection: cumulative graph must be square");
    require(d >= 1 && d <= cumulative.rows(),
            "fit_svd_projection: need 1 <= d <= n");
    const SvdFactors f = compute_svd(cumulative);
    Eigen::MatrixXd v = f.V.leftCols(d);
    // sign convention: largest-magnitude entry of each column positive
    for (Eigen::Index j = 0; j < d; ++j) {
        Eigen::Index at = 0;
        v.col(j).cwiseAbs().maxCoeff(&at);
        if (v(at, j) < 0.0) v.col(j) = -v.col(j);
    }
    return FeatureMap::make_svd_projection(std::move(v));
}

DesignPair build_design(const AdjacencySequence& seq, const FeatureMap& map) {
    if (seq.size() < 2)
        throw std::invalid_argument("build_design: need at least two snapshots");
    const auto t_count = static_cast<Eigen::Index>(seq.size()) - 1;
    const Eigen::Index m = map.feature_rows();
    const Eigen::Index d = map.feature_cols();

    DesignPair design;
    design.prev.resize(t_count * m, d);
    design.next.resize(t_count * m, d);
    Eigen::MatrixXd block = map.apply(seq.front());
    for (Eigen::Index t = 0; t < t_count; ++t) {
        design.prev.middleRows(t * m, m) = block;
        block = map.apply(seq[static_cast<std::size_t>(t + 1)]);
        design.next.middleRows(t * m, m) = block;
    }
    return design;
}

}  // namespace graphpred
