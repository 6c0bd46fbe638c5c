#include "graphpred/matrix_kernels.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace graphpred {

Eigen::Index SvdFactors::rank(double rel_tol) const {
    if (singular_values.size() == 0) return 0;
    const double sigma_max = singular_values(0);
    if (!(sigma_max > 0.0)) return 0;
    const double cutoff = rel_tol * sigma_max;
    Eigen::Index r = 0;
    while (r < singular_values.size() && singular_values(r) > cutoff) ++r;
    return r;
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& z, double gamma) {
    if (gamma < 0.0) throw std::invalid_argument("soft_threshold: gamma < 0");
    if (gamma == 0.0) return z;
    return z.array().sign() * (z.array().abs() - gamma).max(0.0);
}

namespace {

bool factors_finite(const SvdFactors& f) {
    return f.U.allFinite() && f.singular_values.allFinite() && f.V.allFinite();
}

}  // namespace

SvdFactors compute_svd(const Eigen::MatrixXd& z) {
    if (!z.allFinite())
        throw std::invalid_argument("compute_svd: non-finite input");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdFactors out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
    if (svd.info() == Eigen::Success && factors_finite(out)) return out;
    // BDC occasionally emits NaNs (Eigen 3.4); the one-sided Jacobi route is
    // slower but dependable
    Eigen::JacobiSVD<Eigen::MatrixXd> jacobi(
        z, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (jacobi.info() != Eigen::Success)
        throw std::runtime_error("compute_svd: factorization did not converge");
    out = SvdFactors{jacobi.matrixU(), jacobi.singularValues(), jacobi.matrixV()};
    if (!factors_finite(out))
        throw std::runtime_error("compute_svd: factorization produced non-finite values");
    return out;
}

Eigen::MatrixXd svd_shrink(const Eigen::MatrixXd& z, double tau) {
    if (tau < 0.0) throw std::invalid_argument("svd_shrink: tau < 0");
    if (tau == 0.0) return z;
    const SvdFactors f = compute_svd(z);
    Eigen::Index keep = 0;
    while (keep < f.singular_values.size() && f.singular_values(keep) > tau) ++keep;
    if (keep == 0) return Eigen::MatrixXd::Zero(z.rows(), z.cols());
    const Eigen::VectorXd shrunk =
        f.singular_values.head(keep).array() - tau;
    return f.U.leftCols(keep) * shrunk.asDiagonal() * f.V.leftCols(keep).transpose();
}

double nuclear_norm(const Eigen::MatrixXd& z) {
    if (z.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
    return svd.singularValues().sum();
}

double spectral_norm(const Eigen::MatrixXd& z) {
    if (z.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
    return svd.singularValues()(0);
}

namespace {

void check_projection_shapes(const Eigen::MatrixXd& b, const SvdFactors& factors,
                             const char* who) {
    if (factors.U.rows() != b.rows() || factors.V.rows() != b.cols())
        throw std::invalid_argument(std::string(who) +
                                    ": matrix shape does not match the factors");
}

}  // namespace

Eigen::MatrixXd project_tangent(const Eigen::MatrixXd& b, const SvdFactors& factors) {
    check_projection_shapes(b, factors, "project_tangent");
    const Eigen::Index r = factors.rank();
    const auto u = factors.U.leftCols(r);
    const auto v = factors.V.leftCols(r);
    // P_{U_perp} B P_{V_perp} without forming the projectors
    const Eigen::MatrixXd left = b - u * (u.transpose() * b);
    const Eigen::MatrixXd both = left - (left * v) * v.transpose();
    return b - both;
}

FourBlockDecomposition four_block_decomposition(const Eigen::MatrixXd& b,
                                                const SvdFactors& factors) {
    check_projection_shapes(b, factors, "four_block_decomposition");
    const Eigen::Index r = factors.rank();
    const auto u = factors.U.leftCols(r);
    const auto v = factors.V.leftCols(r);

    const Eigen::MatrixXd bu = u * (u.transpose() * b);  // P_U B
    const Eigen::MatrixXd buperp = b - bu;

    FourBlockDecomposition out;
    out.u_v = (bu * v) * v.transpose();
    out.u_vperp = bu - out.u_v;
    out.uperp_v = (buperp * v) * v.transpose();
    out.uperp_vperp = buperp - out.uperp_v;
    return out;
}

}  // namespace graphpred
