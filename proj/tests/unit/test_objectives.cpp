#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <random>

#include "graphpred/graph_gen.hpp"
#include "graphpred/matrix_kernels.hpp"
#include "graphpred/objectives.hpp"
#include "graphpred/rng.hpp"
#include "support/oracles.hpp"

using namespace graphpred;

namespace {

ProblemData synthetic_problem(Eigen::Index n, Eigen::Index t_count, Eigen::Index r,
                              std::uint64_t seed, double sigma = 0.4) {
    GeneratorParams params;
    params.n = n;
    params.T = t_count;
    params.r = r;
    params.sigma = sigma;
    params.seed = seed;
    const SyntheticInstance inst = generate(params);
    const AdjacencySequence seq = inst.observed();
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : seq) cumulative += a;
    return ProblemData::from_sequence(seq, fit_svd_projection(cumulative, r));
}

Eigen::VectorXd pack(const Eigen::MatrixXd& s, const Eigen::MatrixXd& w) {
    Eigen::VectorXd x(s.size() + w.size());
    x.head(s.size()) = Eigen::Map<const Eigen::VectorXd>(s.data(), s.size());
    x.tail(w.size()) = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    return x;
}

}  // namespace

TEST_CASE("design operator blocks vanish at the origin and split cleanly") {
    const ProblemData data = synthetic_problem(6, 4, 2, 1);
    const DesignOperator op(data);
    const Eigen::MatrixXd zero_s = Eigen::MatrixXd::Zero(data.n, data.n);
    const Eigen::MatrixXd zero_w = Eigen::MatrixXd::Zero(data.d, data.d);

    auto [b1, b2] = op.apply_blocks(zero_s, zero_w);
    CHECK(b1.cwiseAbs().maxCoeff() == 0.0);
    CHECK(b2.cwiseAbs().maxCoeff() == 0.0);

    std::mt19937_64 gen(3);
    const Eigen::MatrixXd s = gaussian_matrix(data.n, data.n, gen);
    auto [c1, c2] = op.apply_blocks(s, zero_w);
    CHECK(c1.cwiseAbs().maxCoeff() == 0.0);
    CHECK((c2 - data.map.apply(s)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("design operator is additive") {
    const ProblemData data = synthetic_problem(5, 3, 2, 5);
    const DesignOperator op(data);
    std::mt19937_64 gen(7);
    const Eigen::MatrixXd s1 = gaussian_matrix(data.n, data.n, gen);
    const Eigen::MatrixXd s2 = gaussian_matrix(data.n, data.n, gen);
    const Eigen::MatrixXd w1 = gaussian_matrix(data.d, data.d, gen);
    const Eigen::MatrixXd w2 = gaussian_matrix(data.d, data.d, gen);

    auto [sum1, sum2] = op.apply_blocks(s1 + s2, w1 + w2);
    auto [a1, a2] = op.apply_blocks(s1, w1);
    auto [b1, b2] = op.apply_blocks(s2, w2);
    CHECK((sum1 - a1 - b1).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((sum2 - a2 - b2).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("objective at the origin is the scaled design norm") {
    const ProblemData data = synthetic_problem(6, 4, 2, 9);
    const Hyperparams params;
    const double value =
        convex_objective(data, params, Eigen::MatrixXd::Zero(data.n, data.n),
                         Eigen::MatrixXd::Zero(data.d, data.d));
    CHECK(value == doctest::Approx(data.design_next.squaredNorm() / data.d)
                       .epsilon(1e-12));
}

TEST_CASE("objective reduces to the penalties on all-zero data") {
    const FeatureMap map = FeatureMap::make_degree(3);
    ProblemData data;
    data.map = map;
    data.n = 3;
    data.d = 3;
    data.T = 2;
    data.design_prev = Eigen::MatrixXd::Zero(2, 3);
    data.design_next = Eigen::MatrixXd::Zero(2, 3);
    data.last_features = Eigen::MatrixXd::Zero(1, 3);
    data.validate();

    Hyperparams params;
    params.tau = 2.0;
    params.gamma = 0.5;
    params.kappa = 0.25;
    std::mt19937_64 gen(11);
    // rows of S sum to zero, so the degree features of S vanish and only
    // the penalties remain
    Eigen::MatrixXd s = gaussian_matrix(3, 3, gen);
    s.col(2) = -s.col(0) - s.col(1);
    const Eigen::MatrixXd w = gaussian_matrix(3, 3, gen);
    const double expected = 2.0 * nuclear_norm(s) + 0.5 * l1_norm(s) +
                            0.25 * l1_norm(w);
    CHECK(convex_objective(data, params, s, w) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("unpenalized objective at the least-squares point is the residual") {
    const ProblemData data = synthetic_problem(6, 5, 2, 13);
    const Hyperparams params;  // all penalties zero
    // W from the normal equations of the transition fit alone; S chosen so
    // the prediction residual vanishes.
    const Eigen::MatrixXd w =
        (data.design_prev.transpose() * data.design_prev)
            .ldlt()
            .solve(data.design_prev.transpose() * data.design_next);
    const Eigen::MatrixXd s =
        data.last_features * w * data.map.projection().transpose();
    const double expected =
        (data.design_prev * w - data.design_next).squaredNorm() / data.d;
    CHECK(convex_objective(data, params, s, w) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("objective written through the design operator matches") {
    const ProblemData data = synthetic_problem(5, 4, 2, 17);
    Hyperparams params;
    params.tau = 0.3;
    params.gamma = 0.2;
    params.kappa = 0.1;
    const DesignOperator op(data);
    std::mt19937_64 gen(19);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd s = gaussian_matrix(data.n, data.n, gen);
        const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
        auto [b1, b2] = op.apply_blocks(s, w);
        const double via_operator =
            ((b1 - data.design_next).squaredNorm() + b2.squaredNorm()) / data.d +
            params.tau * nuclear_norm(s) + params.gamma * l1_norm(s) +
            params.kappa * l1_norm(w);
        CHECK(convex_objective(data, params, s, w) ==
              doctest::Approx(via_operator).epsilon(1e-10));
    }
}

TEST_CASE("objective is convex along random segments") {
    const ProblemData data = synthetic_problem(5, 3, 2, 23);
    Hyperparams params;
    params.tau = 0.4;
    params.gamma = 0.15;
    params.kappa = 0.1;
    std::mt19937_64 gen(29);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd s1 = gaussian_matrix(data.n, data.n, gen);
        const Eigen::MatrixXd s2 = gaussian_matrix(data.n, data.n, gen);
        const Eigen::MatrixXd w1 = gaussian_matrix(data.d, data.d, gen);
        const Eigen::MatrixXd w2 = gaussian_matrix(data.d, data.d, gen);
        const double at1 = convex_objective(data, params, s1, w1);
        const double at2 = convex_objective(data, params, s2, w2);
        for (const double lambda : {0.25, 0.5, 0.75}) {
            const double mixed = convex_objective(
                data, params, lambda * s1 + (1.0 - lambda) * s2,
                lambda * w1 + (1.0 - lambda) * w2);
            CHECK(mixed <= lambda * at1 + (1.0 - lambda) * at2 + 1e-10);
        }
    }
}

TEST_CASE("smooth gradient vanishes at the unpenalized optimum") {
    const ProblemData data = synthetic_problem(6, 5, 2, 31);
    const Eigen::MatrixXd w =
        (data.design_prev.transpose() * data.design_prev)
            .ldlt()
            .solve(data.design_prev.transpose() * data.design_next);
    const Eigen::MatrixXd s =
        data.last_features * w * data.map.projection().transpose();
    auto [grad_s, grad_w] = smooth_gradient(data, s, w);
    CHECK(grad_s.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(grad_w.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("smooth gradient at the origin matches the plug-in form") {
    const ProblemData data = synthetic_problem(5, 4, 2, 37);
    auto [grad_s, grad_w] =
        smooth_gradient(data, Eigen::MatrixXd::Zero(data.n, data.n),
                        Eigen::MatrixXd::Zero(data.d, data.d));
    CHECK(grad_s.cwiseAbs().maxCoeff() == 0.0);
    const Eigen::MatrixXd expected =
        -(2.0 / data.d) * data.design_prev.transpose() * data.design_next;
    CHECK((grad_w - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("smooth gradients match central finite differences") {
    const ProblemData data = synthetic_problem(5, 4, 2, 41);
    const Hyperparams no_penalty;
    std::mt19937_64 gen(43);
    for (int trial = 0; trial < 3; ++trial) {
        const Eigen::MatrixXd s = gaussian_matrix(data.n, data.n, gen);
        const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
        auto [grad_s, grad_w] = smooth_gradient(data, s, w);

        const auto smooth_at = [&](const Eigen::VectorXd& x) {
            const Eigen::Map<const Eigen::MatrixXd> xs(x.data(), data.n, data.n);
            const Eigen::Map<const Eigen::MatrixXd> xw(x.data() + data.n * data.n,
                                                       data.d, data.d);
            return convex_objective(data, no_penalty, xs, xw);
        };
        const Eigen::VectorXd numeric =
            testing::finite_difference_gradient(smooth_at, pack(s, w));
        const Eigen::VectorXd analytic = pack(grad_s, grad_w);
        for (Eigen::Index i = 0; i < numeric.size(); ++i) {
            const double denom = std::max({std::abs(numeric[i]),
                                           std::abs(analytic[i]), 1e-6});
            CHECK(std::abs(numeric[i] - analytic[i]) / denom < 1e-4);
        }
    }
}

TEST_CASE("factored objective agrees with the convex one without penalties") {
    const ProblemData data = synthetic_problem(6, 4, 3, 47);
    std::mt19937_64 gen(53);
    const Eigen::MatrixXd u = gaussian_matrix(data.n, 2, gen);
    const Eigen::MatrixXd v = gaussian_matrix(data.n, 2, gen);
    const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
    const Hyperparams no_penalty;
    CHECK(factored_objective(data, no_penalty, u, v, w) ==
          doctest::Approx(convex_objective(data, no_penalty, u * v.transpose(), w))
              .epsilon(1e-10));
}

TEST_CASE("factored objective at a zero factor leaves fit plus factor penalty") {
    const ProblemData data = synthetic_problem(5, 3, 2, 59);
    Hyperparams params;
    params.gamma = 0.7;
    std::mt19937_64 gen(61);
    const Eigen::MatrixXd u = gaussian_matrix(data.n, 2, gen);
    const Eigen::MatrixXd v = Eigen::MatrixXd::Zero(data.n, 2);
    const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
    Hyperparams convex_params;
    convex_params.tau = 0.0;
    convex_params.gamma = 0.0;
    const double expected =
        convex_objective(data, convex_params, Eigen::MatrixXd::Zero(data.n, data.n), w) +
        0.7 * l1_norm(u);
    CHECK(factored_objective(data, params, u, v, w) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("factored gradient matches finite differences") {
    const ProblemData data = synthetic_problem(5, 4, 2, 67);
    const Hyperparams no_penalty;
    const Eigen::Index r = 2;
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 3; ++trial) {
        const Eigen::MatrixXd u = gaussian_matrix(data.n, r, gen);
        const Eigen::MatrixXd v = gaussian_matrix(data.n, r, gen);
        const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
        const FactoredGradient grad = factored_smooth_gradient(data, u, v, w);

        const auto smooth_at = [&](const Eigen::VectorXd& x) {
            Eigen::Index at = 0;
            const Eigen::Map<const Eigen::MatrixXd> xu(x.data(), data.n, r);
            at += data.n * r;
            const Eigen::Map<const Eigen::MatrixXd> xv(x.data() + at, data.n, r);
            at += data.n * r;
            const Eigen::Map<const Eigen::MatrixXd> xw(x.data() + at, data.d, data.d);
            return factored_objective(data, no_penalty, xu, xv, xw);
        };
        Eigen::VectorXd x(u.size() + v.size() + w.size());
        x << Eigen::Map<const Eigen::VectorXd>(u.data(), u.size()),
            Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()),
            Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
        const Eigen::VectorXd numeric =
            testing::finite_difference_gradient(smooth_at, x);
        Eigen::VectorXd analytic(x.size());
        analytic << Eigen::Map<const Eigen::VectorXd>(grad.u.data(), grad.u.size()),
            Eigen::Map<const Eigen::VectorXd>(grad.v.data(), grad.v.size()),
            Eigen::Map<const Eigen::VectorXd>(grad.w.data(), grad.w.size());
        for (Eigen::Index i = 0; i < numeric.size(); ++i) {
            const double denom = std::max({std::abs(numeric[i]),
                                           std::abs(analytic[i]), 1e-6});
            CHECK(std::abs(numeric[i] - analytic[i]) / denom < 1e-4);
        }
    }
}

TEST_CASE("factored gradient degenerates to the graph gradient at V = I") {
    const ProblemData data = synthetic_problem(5, 3, 2, 73);
    std::mt19937_64 gen(79);
    const Eigen::MatrixXd u = gaussian_matrix(data.n, data.n, gen);
    const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(data.n, data.n);
    const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
    const FactoredGradient grad = factored_smooth_gradient(data, u, v, w);
    auto [grad_s, grad_w] = smooth_gradient(data, u, w);
    CHECK((grad.u - grad_s).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((grad.w - grad_w).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dual certificates vanish on noiseless data") {
    GeneratorParams params;
    params.n = 8;
    params.T = 4;
    params.r = 2;
    params.sigma = 0.0;
    params.seed = 83;
    const SyntheticInstance inst = generate(params);
    const ProblemData data = ProblemData::from_sequence(
        inst.observed(), FeatureMap::make_pseudoinverse(inst.latent_basis));
    const DualCertificates cert =
        dual_certificates(data, inst.transition, inst.held_out());
    CHECK(cert.design_residual.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(cert.forecast_residual.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(cert.graph_certificate.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(cert.transition_certificate.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(cert.suggested_tau < 1e-10);
    CHECK(cert.suggested_gamma < 1e-10);
    CHECK(cert.suggested_kappa < 1e-10);
}

TEST_CASE("dual certificates satisfy the pairing identity on random probes") {
    GeneratorParams gen_params;
    gen_params.n = 7;
    gen_params.T = 5;
    gen_params.r = 2;
    gen_params.sigma = 0.5;
    gen_params.seed = 89;
    const SyntheticInstance inst = generate(gen_params);
    const AdjacencySequence seq = inst.observed();
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(gen_params.n, gen_params.n);
    for (const auto& a : seq) cumulative += a;
    const ProblemData data =
        ProblemData::from_sequence(seq, fit_svd_projection(cumulative, 2));

    std::mt19937_64 gen(97);
    const Eigen::MatrixXd some_transition = gaussian_matrix(data.d, data.d, gen);
    const DualCertificates cert =
        dual_certificates(data, some_transition, inst.held_out());
    const DesignOperator op(data);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::MatrixXd s = gaussian_matrix(data.n, data.n, gen);
        const Eigen::MatrixXd w = gaussian_matrix(data.d, data.d, gen);
        auto [b1, b2] = op.apply_blocks(s, w);
        const double lhs = cert.design_residual.cwiseProduct(b1).sum() +
                           cert.forecast_residual.cwiseProduct(b2).sum();
        const double rhs = cert.graph_certificate.cwiseProduct(s).sum() +
                           cert.transition_certificate.cwiseProduct(w).sum();
        CHECK(std::abs(lhs - rhs) <=
              1e-8 * std::max(1.0, std::abs(lhs) + std::abs(rhs)));
    }

    // operator norm dominates the largest entry
    CHECK(spectral_norm(cert.graph_certificate) + 1e-12 >=
          cert.graph_certificate.cwiseAbs().maxCoeff());
}

TEST_CASE("suggested regularization levels follow the certificate norms") {
    GeneratorParams gen_params;
    gen_params.n = 6;
    gen_params.T = 4;
    gen_params.r = 2;
    gen_params.seed = 101;
    const SyntheticInstance inst = generate(gen_params);
    const AdjacencySequence seq = inst.observed();
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(gen_params.n, gen_params.n);
    for (const auto& a : seq) cumulative += a;
    const ProblemData data =
        ProblemData::from_sequence(seq, fit_svd_projection(cumulative, 2));

    std::mt19937_64 gen(103);
    const Eigen::MatrixXd probe = gaussian_matrix(data.d, data.d, gen);
    const double alpha = 0.3;
    const DualCertificates cert =
        dual_certificates(data, probe, inst.held_out(), alpha);
    const double inv_d = 1.0 / static_cast<double>(data.d);
    CHECK(cert.suggested_tau ==
          doctest::Approx(2.0 * alpha * inv_d *
                          spectral_norm(cert.graph_certificate))
              .epsilon(1e-12));
    CHECK(cert.suggested_gamma ==
          doctest::Approx(2.0 * (1.0 - alpha) * inv_d *
                          cert.graph_certificate.cwiseAbs().maxCoeff())
              .epsilon(1e-12));
    CHECK(cert.suggested_kappa ==
          doctest::Approx(2.0 * cert.transition_certificate.cwiseAbs().maxCoeff())
              .epsilon(1e-12));
    CHECK_THROWS_AS(dual_certificates(data, probe, inst.held_out(), 1.5),
                    std::invalid_argument);
}
