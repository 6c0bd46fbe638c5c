#include "graphpred/objectives.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "graphpred/matrix_kernels.hpp"

namespace graphpred {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_point(const ProblemData& data, const Eigen::MatrixXd& s,
                 const Eigen::MatrixXd& w) {
    require(s.rows() == data.n && s.cols() == data.n,
            "objectives: graph variable must be n x n");
    require(w.rows() == data.d && w.cols() == data.d,
            "objectives: transition variable must be d x d");
}

}  // namespace

ProblemData ProblemData::from_sequence(const AdjacencySequence& seq, FeatureMap map) {
    if (seq.size() < 2)
        throw std::invalid_argument("ProblemData: need at least two snapshots");
    ProblemData data;
    DesignPair design = build_design(seq, map);
    data.design_prev = std::move(design.prev);
    data.design_next = std::move(design.next);
    data.last_features = map.apply(seq.back());
    data.n = map.n();
    data.d = map.feature_cols();
    data.T = static_cast<Eigen::Index>(seq.size()) - 1;
    data.cumulative = Eigen::MatrixXd::Zero(data.n, data.n);
    for (const auto& a : seq) data.cumulative += a;
    data.map = std::move(map);
    data.validate();
    return data;
}

void ProblemData::validate() const {
    require(n == map.n() && d == map.feature_cols(),
            "ProblemData: map dimensions disagree with n/d");
    const Eigen::Index m = map.feature_rows();
    require(T >= 1, "ProblemData: need at least one transition");
    require(design_prev.rows() == T * m && design_prev.cols() == d,
            "ProblemData: design_prev has the wrong shape");
    require(design_next.rows() == design_prev.rows() &&
                design_next.cols() == design_prev.cols(),
            "ProblemData: design_prev/design_next shapes differ");
    require(last_features.rows() == m && last_features.cols() == d,
            "ProblemData: last_features has the wrong shape");
    const double scale = design_next.cwiseAbs().maxCoeff();
    require((design_next.bottomRows(m) - last_features).cwiseAbs().maxCoeff() <=
                1e-10 * std::max(1.0, scale),
            "ProblemData: last_features must equal the last design_next block");
    require(cumulative.size() == 0 ||
                (cumulative.rows() == n && cumulative.cols() == n),
            "ProblemData: cumulative graph must be n x n");
}

void Hyperparams::validate() const {
    require(tau >= 0.0 && gamma >= 0.0 && kappa >= 0.0,
            "Hyperparams: regularization levels must be nonnegative");
    require(alpha > 0.0 && alpha < 1.0, "Hyperparams: alpha must be in (0, 1)");
    require(rank >= 0, "Hyperparams: rank must be nonnegative");
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> DesignOperator::apply_blocks(
    const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) const {
    check_point(*data, s, w);
    return {data->design_prev * w,
            data->map.apply(s) - data->last_features * w};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> DesignOperator::adjoint_blocks(
    const Eigen::MatrixXd& block1, const Eigen::MatrixXd& block2) const {
    require(block1.rows() == data->design_prev.rows() && block1.cols() == data->d,
            "DesignOperator: block1 has the wrong shape");
    require(block2.rows() == data->feature_rows() && block2.cols() == data->d,
            "DesignOperator: block2 has the wrong shape");
    Eigen::MatrixXd s_part = data->map.adjoint(block2);
    Eigen::MatrixXd w_part = data->design_prev.transpose() * block1 -
                             data->last_features.transpose() * block2;
    return {std::move(s_part), std::move(w_part)};
}

Eigen::Index DesignOperator::domain_dim() const {
    return data->n * data->n + data->d * data->d;
}

Eigen::Index DesignOperator::codomain_dim() const {
    return (data->design_prev.rows() + data->feature_rows()) * data->d;
}

Eigen::VectorXd DesignOperator::apply(const Eigen::VectorXd& x) const {
    const Eigen::Index n = data->n, d = data->d;
    require(x.size() == domain_dim(), "DesignOperator: bad domain vector size");
    const Eigen::Map<const Eigen::MatrixXd> s(x.data(), n, n);
    const Eigen::Map<const Eigen::MatrixXd> w(x.data() + n * n, d, d);
    auto [b1, b2] = apply_blocks(s, w);
    Eigen::VectorXd y(codomain_dim());
    y.head(b1.size()) = Eigen::Map<const Eigen::VectorXd>(b1.data(), b1.size());
    y.tail(b2.size()) = Eigen::Map<const Eigen::VectorXd>(b2.data(), b2.size());
    return y;
}

Eigen::VectorXd DesignOperator::adjoint(const Eigen::VectorXd& y) const {
    const Eigen::Index n = data->n, d = data->d;
    const Eigen::Index rows1 = data->design_prev.rows();
    const Eigen::Index rows2 = data->feature_rows();
    require(y.size() == codomain_dim(), "DesignOperator: bad codomain vector size");
    const Eigen::Map<const Eigen::MatrixXd> b1(y.data(), rows1, d);
    const Eigen::Map<const Eigen::MatrixXd> b2(y.data() + rows1 * d, rows2, d);
    auto [s_part, w_part] = adjoint_blocks(b1, b2);
    Eigen::VectorXd x(domain_dim());
    x.head(n * n) = Eigen::Map<const Eigen::VectorXd>(s_part.data(), n * n);
    x.tail(d * d) = Eigen::Map<const Eigen::VectorXd>(w_part.data(), d * d);
    return x;
}

double convex_objective(const ProblemData& data, const Hyperparams& params,
                        const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) {
    check_point(data, s, w);
    const double inv_d = 1.0 / static_cast<double>(data.d);
    const double fit_w = (data.design_prev * w - data.design_next).squaredNorm();
    const double fit_s = (data.last_features * w - data.map.apply(s)).squaredNorm();
    return inv_d * (fit_w + fit_s) + params.tau * nuclear_norm(s) +
           params.gamma * l1_norm(s) + params.kappa * l1_norm(w);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> smooth_gradient(
    const ProblemData& data, const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) {
    check_point(data, s, w);
    const double scale = 2.0 / static_cast<double>(data.d);
    const Eigen::MatrixXd residual = data.map.apply(s) - data.last_features * w;
    Eigen::MatrixXd grad_s = scale * data.map.adjoint(residual);
    Eigen::MatrixXd grad_w =
        scale * (data.design_prev.transpose() *
                     (data.design_prev * w - data.design_next) -
                 data.last_features.transpose() * residual);
    return {std::move(grad_s), std::move(grad_w)};
}

double factored_objective(const ProblemData& data, const Hyperparams& params,
                          const Eigen::MatrixXd& u, const Eigen::MatrixXd& v,
                          const Eigen::MatrixXd& w) {
    require(u.rows() == data.n && v.rows() == data.n && u.cols() == v.cols(),
            "factored_objective: factors must be n x r with matching r");
    require(w.rows() == data.d && w.cols() == data.d,
            "factored_objective: transition must be d x d");
    const double inv_d = 1.0 / static_cast<double>(data.d);
    const double fit_w = (data.design_prev * w - data.design_next).squaredNorm();
    const double fit_s =
        (data.last_features * w - data.map.apply(u * v.transpose())).squaredNorm();
    return inv_d * (fit_w + fit_s) + params.gamma * (l1_norm(u) + l1_norm(v)) +
           params.kappa * l1_norm(w);
}

FactoredGradient factored_smooth_gradient(const ProblemData& data,
                                          const Eigen::MatrixXd& u,
                                          const Eigen::MatrixXd& v,
                                          const Eigen::MatrixXd& w) {
    require(u.rows() == data.n && v.rows() == data.n && u.cols() == v.cols(),
            "factored_smooth_gradient: factors must be n x r with matching r");
    auto [grad_s, grad_w] = smooth_gradient(data, u * v.transpose(), w);
    FactoredGradient grad;
    grad.u = grad_s * v;
    grad.v = grad_s.transpose() * u;
    grad.w = std::move(grad_w);
    return grad;
}

DualCertificates dual_certificates(const ProblemData& data,
                                   const Eigen::MatrixXd& true_transition,
                                   const Eigen::MatrixXd& next_snapshot,
                                   double alpha) {
    require(true_transition.rows() == data.d && true_transition.cols() == data.d,
            "dual_certificates: transition must be d x d");
    require(next_snapshot.rows() == data.n && next_snapshot.cols() == data.n,
            "dual_certificates: next snapshot must be n x n");
    require(alpha > 0.0 && alpha < 1.0, "dual_certificates: alpha must be in (0, 1)");

    DualCertificates cert;
    cert.design_residual = data.design_next - data.design_prev * true_transition;
    cert.forecast_residual =
        data.last_features * true_transition - data.map.apply(next_snapshot);

    const DesignOperator op(data);
    auto [graph_cert, transition_cert] =
        op.adjoint_blocks(cert.design_residual, cert.forecast_residual);
    cert.graph_certificate = std::move(graph_cert);
    cert.transition_certificate = std::move(transition_cert);

    const double inv_d = 1.0 / static_cast<double>(data.d);
    const double m_op = spectral_norm(cert.graph_certificate);
    const double m_inf = cert.graph_certificate.size() == 0
                             ? 0.0
                             : cert.graph_certificate.cwiseAbs().maxCoeff();
    const double xi_inf = cert.transition_certificate.size() == 0
                              ? 0.0
                              : cert.transition_certificate.cwiseAbs().maxCoeff();
    cert.suggested_tau = 2.0 * alpha * inv_d * m_op;
    cert.suggested_gamma = 2.0 * (1.0 - alpha) * inv_d * m_inf;
    cert.suggested_kappa = 2.0 * xi_inf;
    return cert;
}

}  // namespace graphpred
