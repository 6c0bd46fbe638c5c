#include "graphpred/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "graphpred/matrix_kernels.hpp"
#include "graphpred/rng.hpp"

namespace graphpred {

PairMask off_diagonal_mask(Eigen::Index n) {
    PairMask mask;
    mask.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) mask.emplace_back(i, j);
    return mask;
}

ScoreMatrix nn_scores(const Eigen::MatrixXd& cumulative) {
    if (cumulative.rows() != cumulative.cols())
        throw std::invalid_argument("nn_scores: cumulative graph must be square");
    return {cumulative * cumulative, off_diagonal_mask(cumulative.rows())};
}

ScoreMatrix shrink_scores(const Eigen::MatrixXd& cumulative, Eigen::Index rank) {
    if (cumulative.rows() != cumulative.cols())
        throw std::invalid_argument("shrink_scores: cumulative graph must be square");
    if (rank < 1 || rank > cumulative.rows())
        throw std::invalid_argument("shrink_scores: need 1 <= rank <= n");
    const SvdFactors f = compute_svd(cumulative);
    Eigen::MatrixXd approx = f.U.leftCols(rank) *
                             f.singular_values.head(rank).asDiagonal() *
                             f.V.leftCols(rank).transpose();
    return {std::move(approx), off_diagonal_mask(cumulative.rows())};
}

EvalReport auc(const ScoreMatrix& scores, const Eigen::MatrixXd& truth,
               double positive_threshold) {
    if (truth.rows() != scores.values.rows() || truth.cols() != scores.values.cols())
        throw std::invalid_argument("auc: truth and scores shapes differ");
    const PairMask& mask =
        scores.mask.empty() ? off_diagonal_mask(scores.values.rows()) : scores.mask;
    if (mask.empty()) throw std::invalid_argument("auc: empty mask");

    // Mann-Whitney with midranks for ties
    std::vector<std::pair<double, bool>> entries;
    entries.reserve(mask.size());
    std::size_t positives = 0;
    for (const auto& [i, j] : mask) {
        const bool is_link = truth(i, j) > positive_threshold;
        positives += is_link ? 1u : 0u;
        entries.emplace_back(scores.values(i, j), is_link);
    }
    const std::size_t negatives = entries.size() - positives;
    if (positives == 0 || negatives == 0)
        throw DegenerateTruthError(
            "auc: truth has no positives or no negatives over the mask");

    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double positive_rank_sum = 0.0;
    std::size_t at = 0;
    while (at < entries.size()) {
        std::size_t end = at;
        while (end < entries.size() && entries[end].first == entries[at].first) ++end;
        const double mid_rank = 0.5 * static_cast<double>(at + 1 + end);  // 1-based
        for (std::size_t k = at; k < end; ++k)
            if (entries[k].second) positive_rank_sum += mid_rank;
        at = end;
    }
    const double p = static_cast<double>(positives);
    const double value = (positive_rank_sum - p * (p + 1.0) / 2.0) /
                         (p * static_cast<double>(negatives));

    EvalReport report;
    report.auc = value;
    report.n_pairs = static_cast<Eigen::Index>(mask.size());
    return report;
}

std::string to_string(Method method) {
    switch (method) {
        case Method::nn: return "nn";
        case Method::shrink: return "shrink";
        case Method::gfb: return "gfb";
        case Method::factorized: return "factorized";
    }
    return "unknown";
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "nn") return Method::nn;
    if (name == "shrink") return Method::shrink;
    if (name == "gfb") return Method::gfb;
    if (name == "factorized") return Method::factorized;
    return std::nullopt;
}

namespace {

FeatureMap build_feature_map(const FitOptions& options, Eigen::Index n,
                             const Eigen::MatrixXd& cumulative) {
    switch (options.map_kind) {
        case FeatureMapKind::degree:
            return FeatureMap::make_degree(n);
        case FeatureMapKind::svd_projection:
            if (options.feature_dim < 1)
                throw std::invalid_argument(
                    "fit_and_score: feature_dim must be set for the projection map");
            return fit_svd_projection(cumulative, options.feature_dim);
        case FeatureMapKind::pseudoinverse:
            if (options.oracle_basis.size() == 0)
                throw std::invalid_argument(
                    "fit_and_score: the pseudoinverse map needs the latent basis");
            return FeatureMap::make_pseudoinverse(options.oracle_basis);
        case FeatureMapKind::explicit_basis:
            throw std::invalid_argument(
                "fit_and_score: explicit-basis maps must be built by the caller");
    }
    throw std::logic_error("build_feature_map: unreachable");
}

}  // namespace

FitOutcome fit_and_score(Method method, const AdjacencySequence& seq,
                         const Hyperparams& params, const FitOptions& options) {
    if (seq.empty()) throw std::invalid_argument("fit_and_score: empty sequence");
    const Eigen::Index n = seq.front().rows();
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(n, n);
    for (const auto& a : seq) cumulative += a;

    FitOutcome outcome;
    switch (method) {
        case Method::nn:
            outcome.scores = nn_scores(cumulative);
            return outcome;
        case Method::shrink:
            outcome.scores = shrink_scores(cumulative, params.rank);
            return outcome;
        case Method::gfb: {
            ProblemData data = ProblemData::from_sequence(
                seq, build_feature_map(options, n, cumulative));
            SolverResult result = solve_gfb(data, params, options.solver);
            outcome.scores = {std::move(result.predicted_graph), off_diagonal_mask(n)};
            outcome.iterations = result.iterations;
            outcome.converged = result.converged;
            outcome.objective_final = result.objective_trace.back();
            return outcome;
        }
        case Method::factorized: {
            ProblemData data = ProblemData::from_sequence(
                seq, build_feature_map(options, n, cumulative));
            SolverResult result =
                solve_factorized(data, params, params.rank, options.solver);
            outcome.scores = {std::move(result.predicted_graph), off_diagonal_mask(n)};
            outcome.iterations = result.iterations;
            outcome.converged = result.converged;
            outcome.objective_final = result.objective_trace.back();
            return outcome;
        }
    }
    throw std::logic_error("fit_and_score: unreachable");
}

namespace {

PairMask subsample_mask(const PairMask& pairs, double fraction,
                        std::mt19937_64& rng) {
    const auto total = pairs.size();
    auto keep = static_cast<std::size_t>(fraction * static_cast<double>(total));
    keep = std::clamp<std::size_t>(keep, 1, total);
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), 0u);
    for (std::size_t k = 0; k < keep; ++k) {  // partial Fisher-Yates
        const std::size_t pick =
            k + static_cast<std::size_t>(bounded_int(rng, total - k));
        std::swap(order[k], order[pick]);
    }
    PairMask mask;
    mask.reserve(keep);
    for (std::size_t k = 0; k < keep; ++k) mask.push_back(pairs[order[k]]);
    return mask;
}

bool strictly_better(const CrossValidationCell& a, const CrossValidationCell& b) {
    // higher AUC wins; exact ties go to larger (tau, gamma, kappa, rank)
    if (a.mean_auc != b.mean_auc) return a.mean_auc > b.mean_auc;
    const auto key = [](const Hyperparams& h) {
        return std::make_tuple(h.tau, h.gamma, h.kappa, h.rank);
    };
    return key(a.params) > key(b.params);
}

}  // namespace

std::vector<CrossValidationCell> cross_validate_detailed(
    const AdjacencySequence& seq, const std::vector<Hyperparams>& grid,
    const CrossValidationOptions& options, int folds) {
    if (grid.empty()) throw std::invalid_argument("cross_validate: empty grid");
    if (folds < 1) throw std::invalid_argument("cross_validate: folds must be >= 1");
    if (seq.size() < 3)
        throw std::invalid_argument(
            "cross_validate: need at least three snapshots for an internal split");

    const AdjacencySequence train(seq.begin(), seq.end() - 1);
    const Eigen::MatrixXd& holdout = seq.back();
    const PairMask all_pairs = off_diagonal_mask(holdout.rows());

    std::vector<PairMask> fold_masks;
    fold_masks.reserve(static_cast<std::size_t>(folds));
    for (int j = 0; j < folds; ++j) {
        std::mt19937_64 rng(options.seed * 0x9e3779b97f4a7c15ULL +
                            static_cast<std::uint64_t>(j));
        fold_masks.push_back(
            folds == 1 ? all_pairs
                       : subsample_mask(all_pairs, options.mask_fraction, rng));
    }

    std::vector<CrossValidationCell> cells;
    cells.reserve(grid.size());
    for (const Hyperparams& params : grid) {
        CrossValidationCell cell;
        cell.params = params;
        double sum = 0.0;
        // the fit is deterministic, so folds only re-mask the validation pairs
        try {
            const FitOutcome outcome =
                fit_and_score(options.method, train, params, options.fit);
            for (const PairMask& mask : fold_masks) {
                try {
                    ScoreMatrix masked{outcome.scores.values, mask};
                    sum += auc(masked, holdout).auc;
                    ++cell.folds_used;
                } catch (const DegenerateTruthError&) {
                }
            }
        } catch (const DivergenceError&) {
        }
        cell.mean_auc = cell.folds_used > 0
                            ? sum / cell.folds_used
                            : -std::numeric_limits<double>::infinity();
        cells.push_back(std::move(cell));
    }
    return cells;
}

Hyperparams cross_validate(const AdjacencySequence& seq,
                           const std::vector<Hyperparams>& grid,
                           const CrossValidationOptions& options, int folds) {
    const auto cells = cross_validate_detailed(seq, grid, options, folds);
    const CrossValidationCell* best = nullptr;
    for (const auto& cell : cells) {
        if (cell.folds_used == 0) continue;
        if (!best || strictly_better(cell, *best)) best = &cell;
    }
    if (!best)
        throw std::runtime_error("cross_validate: every grid point degenerated");
    return best->params;
}

}  // namespace graphpred
