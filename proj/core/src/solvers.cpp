#include "graphpred/solvers.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "graphpred/linear_operator.hpp"
#include "graphpred/matrix_kernels.hpp"

namespace graphpred {

namespace {

bool relative_change_below(double current, double previous, double rel_tol) {
    return std::abs(current - previous) / std::max(1.0, previous) < rel_tol;
}

/// Operator norm of the feature map alone.
double feature_map_norm(const FeatureMap& map) {
    switch (map.kind()) {
        case FeatureMapKind::degree:
            return std::sqrt(static_cast<double>(map.n()));
        case FeatureMapKind::svd_projection:
        case FeatureMapKind::pseudoinverse:
            return spectral_norm(map.projection());
        case FeatureMapKind::explicit_basis: {
            // Gram matrix of the basis under the Frobenius inner product
            const auto& basis = map.basis();
            const auto d = static_cast<Eigen::Index>(basis.size());
            Eigen::MatrixXd gram(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = i; j < d; ++j) {
                    gram(i, j) = basis[static_cast<std::size_t>(i)]
                                     .cwiseProduct(basis[static_cast<std::size_t>(j)])
                                     .sum();
                    gram(j, i) = gram(i, j);
                }
            return std::sqrt(std::max(0.0, spectral_norm(gram)));
        }
    }
    return 0.0;
}

/// Per-block safe step sizes for the coupled smooth part. The quadratic
/// couples the graph and transition blocks with wildly different curvature
/// (the transition sees the stacked design, the graph only the feature
/// map), so a common step makes one block crawl. A block-diagonal metric
/// dominating the full Hessian, cross terms included, keeps the splitting
/// convergent while letting each block move at its own scale.
struct BlockSteps {
    double graph;
    double transition;
};

BlockSteps block_steps(const ProblemData& data, const SolverConfig& config) {
    if (config.step) {
        if (!(*config.step > 0.0))
            throw std::invalid_argument("SolverConfig: step must be positive");
        return {*config.step, *config.step};
    }
    const double inv_d = 1.0 / static_cast<double>(data.d);
    const double map_norm = feature_map_norm(data.map);
    const double design_norm = spectral_norm(data.design_prev);
    const double last_norm = spectral_norm(data.last_features);

    const double a = 2.0 * inv_d * map_norm * map_norm;
    const double b = 2.0 * inv_d * (design_norm * design_norm + last_norm * last_norm);
    const double c = 2.0 * inv_d * map_norm * last_norm;
    //  [[a, c], [c, b]] <= diag(a + c s, b + c / s); s = c/b keeps the
    //  transition block's bound at 2b while barely touching the graph block
    double graph_bound = a, transition_bound = b;
    if (b > 0.0 && c > 0.0) {
        graph_bound = a + c * c / b;
        transition_bound = 2.0 * b;
    }
    BlockSteps steps;
    steps.graph = graph_bound > 0.0 ? 1.8 / graph_bound : 1.0;
    steps.transition = transition_bound > 0.0 ? 1.8 / transition_bound : 1.0;
    return steps;
}

}  // namespace

double auto_step(const ProblemData& data, std::uint64_t seed) {
    data.validate();
    const DesignOperator op(data);
    const double norm = operator_norm(op, 5000, 1e-6, seed);
    if (norm <= 1e-12) return 1.0;  // zero operator: any step is safe
    return 0.9 * static_cast<double>(data.d) / (norm * norm);
}

SolverResult solve_gfb(const ProblemData& data, const Hyperparams& params,
                       const SolverConfig& config,
                       const std::optional<WarmStart>& warm) {
    data.validate();
    params.validate();
    if (config.max_iters < 1)
        throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(config.rel_tol > 0.0))
        throw std::invalid_argument("SolverConfig: rel_tol must be positive");

    const BlockSteps steps = block_steps(data, config);
    const double q = SolverConfig::num_prox_terms;

    Eigen::MatrixXd s = warm ? warm->graph : Eigen::MatrixXd::Zero(data.n, data.n);
    Eigen::MatrixXd w =
        warm ? warm->transition : Eigen::MatrixXd::Zero(data.d, data.d);
    Eigen::MatrixXd aux_trace = s;   // absorbs the trace-norm prox
    Eigen::MatrixXd aux_sparse = s;  // absorbs the l1 prox

    SolverResult result;
    result.objective_trace.reserve(static_cast<std::size_t>(config.max_iters) + 1);
    result.objective_trace.push_back(convex_objective(data, params, s, w));

    for (int it = 1; it <= config.max_iters; ++it) {
        auto [grad_s, grad_w] = smooth_gradient(data, s, w);

        // relaxed splitting update: z stays put once prox(2s - z - step*g)
        // lands back on s, so fixed points minimize the full objective
        const Eigen::MatrixXd reflected = 2.0 * s - steps.graph * grad_s;
        Eigen::MatrixXd aux_trace_next =
            aux_trace +
            svd_shrink(reflected - aux_trace, q * steps.graph * params.tau) - s;
        Eigen::MatrixXd aux_sparse_next =
            aux_sparse +
            soft_threshold(reflected - aux_sparse, q * steps.graph * params.gamma) -
            s;
        const double delta_trace = (aux_trace_next - aux_trace).norm();
        const double delta_sparse = (aux_sparse_next - aux_sparse).norm();
        aux_trace = std::move(aux_trace_next);
        aux_sparse = std::move(aux_sparse_next);
        s = (aux_trace + aux_sparse) / q;

        Eigen::MatrixXd w_next = soft_threshold(w - steps.transition * grad_w,
                                                steps.transition * params.kappa);
        const double delta_w = (w_next - w).norm();
        w = std::move(w_next);

        const double objective = convex_objective(data, params, s, w);
        if (!std::isfinite(objective))
            throw DivergenceError(
                "solve_gfb: objective became non-finite at iteration " +
                    std::to_string(it),
                it);
        const double previous = result.objective_trace.back();
        result.objective_trace.push_back(objective);
        result.iterations = it;
        result.fixed_point_residual = delta_trace + delta_sparse + delta_w;
        // converged means both a flat objective and near-stationary updates,
        // so the result carries an optimality certificate
        if (relative_change_below(objective, previous, config.rel_tol) &&
            result.fixed_point_residual <
                10.0 * config.rel_tol * (1.0 + s.norm())) {
            result.converged = true;
            break;
        }
    }

    result.predicted_graph = std::move(s);
    result.transition = std::move(w);
    return result;
}

SolverResult solve_factorized(const ProblemData& data, const Hyperparams& params,
                              Eigen::Index rank, const SolverConfig& config,
                              const std::optional<FactorizedInit>& init) {
    data.validate();
    params.validate();
    if (rank < 1 || rank > data.n)
        throw std::invalid_argument("solve_factorized: need 1 <= rank <= n");
    if (config.max_iters < 1)
        throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    if (!(config.rel_tol > 0.0))
        throw std::invalid_argument("SolverConfig: rel_tol must be positive");

    const double inv_d = 1.0 / static_cast<double>(data.d);
    const double map_norm = feature_map_norm(data.map);
    const double design_norm = spectral_norm(data.design_prev);
    const double last_norm = spectral_norm(data.last_features);
    const double base_w_curv =
        2.0 * inv_d * (design_norm * design_norm + last_norm * last_norm);

    Eigen::MatrixXd u, v, w;
    if (init) {
        if (init->left.rows() != data.n || init->right.rows() != data.n ||
            init->left.cols() != rank || init->right.cols() != rank ||
            init->transition.rows() != data.d || init->transition.cols() != data.d)
            throw std::invalid_argument("solve_factorized: init shapes are wrong");
        u = init->left;
        v = init->right;
        w = init->transition;
    } else {
        if (data.cumulative.size() == 0)
            throw std::invalid_argument(
                "solve_factorized: default init needs the cumulative graph");
        // split the truncated SVD of the cumulative graph evenly
        const SvdFactors f = compute_svd(data.cumulative);
        const Eigen::VectorXd root =
            f.singular_values.head(rank).array().max(0.0).sqrt();
        u = f.U.leftCols(rank) * root.asDiagonal();
        v = f.V.leftCols(rank) * root.asDiagonal();
        w = Eigen::MatrixXd::Zero(data.d, data.d);
    }

    SolverResult result;
    result.objective_trace.reserve(static_cast<std::size_t>(config.max_iters) + 1);
    result.objective_trace.push_back(factored_objective(data, params, u, v, w));

    for (int it = 1; it <= config.max_iters; ++it) {
        const FactoredGradient grad = factored_smooth_gradient(data, u, v, w);

        // local curvature bounds at the current point (Frobenius norms bound
        // the factor operator norms; block-row sums dominate the coupled
        // Hessian), refreshed every iteration since the bilinear term moves
        double step_u = config.step.value_or(0.0);
        double step_v = step_u, step_w = step_u;
        if (!config.step) {
            const double nu = u.norm(), nv = v.norm();
            const double nr =
                (data.map.apply(u * v.transpose()) - data.last_features * w).norm();
            const double p2 = map_norm * map_norm;
            const double cross = p2 * nu * nv + map_norm * nr;
            const double curv_u =
                2.0 * inv_d * (p2 * nv * nv + cross + map_norm * nv * last_norm);
            const double curv_v =
                2.0 * inv_d * (p2 * nu * nu + cross + map_norm * nu * last_norm);
            const double curv_w =
                base_w_curv + 2.0 * inv_d * map_norm * last_norm * (nu + nv);
            step_u = curv_u > 0.0 ? 0.9 / curv_u : 1.0;
            step_v = curv_v > 0.0 ? 0.9 / curv_v : 1.0;
            step_w = curv_w > 0.0 ? 0.9 / curv_w : 1.0;
        } else if (!(step_u > 0.0)) {
            throw std::invalid_argument("SolverConfig: step must be positive");
        }

        Eigen::MatrixXd u_next =
            soft_threshold(u - step_u * grad.u, step_u * params.gamma);
        Eigen::MatrixXd v_next =
            soft_threshold(v - step_v * grad.v, step_v * params.gamma);
        Eigen::MatrixXd w_next =
            soft_threshold(w - step_w * grad.w, step_w * params.kappa);
        result.fixed_point_residual = (u_next - u).norm() + (v_next - v).norm() +
                                      (w_next - w).norm();
        u = std::move(u_next);
        v = std::move(v_next);
        w = std::move(w_next);

        const double objective = factored_objective(data, params, u, v, w);
        if (!std::isfinite(objective))
            throw DivergenceError(
                "solve_factorized: objective became non-finite at iteration " +
                    std::to_string(it),
                it);
        const double previous = result.objective_trace.back();
        result.objective_trace.push_back(objective);
        result.iterations = it;
        if (relative_change_below(objective, previous, config.rel_tol)) {
            result.converged = true;
            break;
        }
    }

    result.predicted_graph = u * v.transpose();
    result.left_factor = std::move(u);
    result.right_factor = std::move(v);
    result.transition = std::move(w);
    return result;
}

}  // namespace graphpred
