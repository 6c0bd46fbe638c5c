#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphpred/feature_map.hpp"
#include "graphpred/objectives.hpp"
#include "graphpred/solvers.hpp"

namespace graphpred {

using PairMask = std::vector<std::pair<Eigen::Index, Eigen::Index>>;

/// All (i, j) with i != j, row-major order.
PairMask off_diagonal_mask(Eigen::Index n);

/// Link scores plus the index pairs they are evaluated on.
struct ScoreMatrix {
    Eigen::MatrixXd values;  // n x n
    PairMask mask;           // empty means all off-diagonal pairs
};

struct EvalReport {
    double auc = 0.0;
    std::string method;
    Eigen::Index n_pairs = 0;
    std::uint64_t seed = 0;
};

struct DegenerateTruthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Common-neighbor baseline: the square of the cumulative graph.
ScoreMatrix nn_scores(const Eigen::MatrixXd& cumulative);

/// Low-rank baseline: rank-r truncated SVD reconstruction of the cumulative
/// graph.
ScoreMatrix shrink_scores(const Eigen::MatrixXd& cumulative, Eigen::Index rank);

/// Area under the ROC curve in Mann-Whitney form (ties count one half),
/// over the mask pairs, with truth binarized at positive_threshold. Throws
/// DegenerateTruthError when the mask holds no positive or no negative.
EvalReport auc(const ScoreMatrix& scores, const Eigen::MatrixXd& truth,
               double positive_threshold = 0.0);

enum class Method { nn, shrink, gfb, factorized };

std::string to_string(Method method);
std::optional<Method> parse_method(const std::string& name);

/// How a method turns a snapshot window into scores.
struct FitOptions {
    FeatureMapKind map_kind = FeatureMapKind::svd_projection;
    Eigen::Index feature_dim = 0;   // svd_projection only; must be >= 1
    SolverConfig solver{};
    Eigen::MatrixXd oracle_basis;   // pseudoinverse map only
};

struct FitOutcome {
    ScoreMatrix scores;
    int iterations = 0;
    bool converged = true;
    std::optional<double> objective_final{};
};

/// Fits `method` on the full window `seq` (baselines use its cumulative
/// graph, solvers its feature design) and returns next-snapshot scores.
FitOutcome fit_and_score(Method method, const AdjacencySequence& seq,
                         const Hyperparams& params, const FitOptions& options);

struct CrossValidationCell {
    Hyperparams params;
    double mean_auc = 0.0;
    int folds_used = 0;
};

struct CrossValidationOptions {
    Method method = Method::gfb;
    FitOptions fit{};
    std::uint64_t seed = 0;
    double mask_fraction = 0.9;  // pair fraction per validation fold
};

/// Grid search with time-ordered holdout: every grid point trains on
/// A_0..A_{T-1} and is scored on predicting A_T; folds differ by random
/// sub-masks of the validation pairs. Returns one cell per grid point.
std::vector<CrossValidationCell> cross_validate_detailed(
    const AdjacencySequence& seq, const std::vector<Hyperparams>& grid,
    const CrossValidationOptions& options, int folds);

/// The argmax grid point; exact AUC ties break toward larger
/// (tau, gamma, kappa, rank) lexicographically. Throws std::runtime_error
/// when every grid point degenerates.
Hyperparams cross_validate(const AdjacencySequence& seq,
                           const std::vector<Hyperparams>& grid,
                           const CrossValidationOptions& options, int folds);

}  // namespace graphpred
