#pragma once

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "graphpred/evaluation.hpp"
#include "graphpred/graph_gen.hpp"

namespace graphpred::harness {

/// Per-parameter candidate lists expanded into a full cross product.
/// Empty lists fall back to the base value of that parameter.
struct GridSpec {
    std::vector<double> tau;
    std::vector<double> gamma;
    std::vector<double> kappa;
    std::vector<Eigen::Index> rank;

    bool empty() const {
        return tau.empty() && gamma.empty() && kappa.empty() && rank.empty();
    }
    std::vector<Hyperparams> expand(const Hyperparams& base) const;
};

struct ExperimentConfig {
    GeneratorParams generator;
    int replications = 1;
    std::vector<Method> methods;
    FeatureMapKind map_kind = FeatureMapKind::svd_projection;
    Eigen::Index feature_dim = 0;  // 0: latent rank of the dataset
    Hyperparams hyper;
    bool use_cv = false;
    int folds = 10;
    GridSpec grid;
    SolverConfig solver;
    int jobs = 1;
    std::filesystem::path out;
    std::filesystem::path data_dir;
};

struct ResultRecord {
    std::string method;
    std::uint64_t seed = 0;
    std::optional<Hyperparams> hyper;
    double auc = 0.0;
    int iterations = 0;
    long long wall_time_ms = 0;
    std::optional<double> objective_final;
    std::optional<double> validation_auc;  // sweep records only
    std::optional<int> folds_used;         // sweep records only
    std::string error;                     // nonempty marks a failed record
};

std::string to_json_line(const ResultRecord& record);
ResultRecord record_from_json_line(const std::string& line);

/// On-disk dataset layout: manifest.json plus one directory per
/// replication holding A_000.mtx .. A_{T+1}.mtx, V0.mtx and W0.mtx.
struct DatasetIndex {
    GeneratorParams params;
    struct Entry {
        std::uint64_t seed;
        std::string dir;
    };
    std::vector<Entry> replications;
};

struct ReplicationData {
    AdjacencySequence snapshots;  // T+2 snapshots, last held out
    Eigen::MatrixXd latent_basis;
    Eigen::MatrixXd transition;
    std::uint64_t seed = 0;
};

DatasetIndex load_dataset_index(const std::filesystem::path& dir);
ReplicationData load_replication(const std::filesystem::path& dir,
                                 const DatasetIndex& index, std::size_t at);

/// Writes `text` next to `path` and renames atomically.
void atomic_write(const std::filesystem::path& path, const std::string& text);

/// Runs body(0..count-1) on up to `jobs` threads. Exceptions must not
/// escape the body.
void parallel_for(int jobs, int count, const std::function<void(int)>& body);

/// Fallback grids when cross-validation is requested without --grid.
/// Solver grids are anchored on residual-scale certificate levels computed
/// from the training window.
GridSpec default_grid(Method method, const GeneratorParams& params,
                      const AdjacencySequence& train, const FitOptions& options);

int cmd_generate(const ExperimentConfig& config);
int cmd_run(const ExperimentConfig& config);
int cmd_sweep(const ExperimentConfig& config);
int cmd_report(const std::vector<std::filesystem::path>& inputs,
               const std::filesystem::path& out_csv);

}  // namespace graphpred::harness
