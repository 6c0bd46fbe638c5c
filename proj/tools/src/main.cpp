// Command-line harness: generate synthetic graph sequences, run the
// prediction methods against them, sweep hyperparameter grids, and
// aggregate result files.
//
// Exit codes: 0 success, 1 partial or total failure, 2 invalid config.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "harness.hpp"

namespace {

using graphpred::FeatureMapKind;
using graphpred::Method;
using graphpred::harness::ExperimentConfig;
using graphpred::harness::GridSpec;
using nlohmann::json;

FeatureMapKind parse_map_kind(const std::string& name) {
    if (name == "degree") return FeatureMapKind::degree;
    if (name == "svd-projection") return FeatureMapKind::svd_projection;
    if (name == "oracle-pseudoinverse") return FeatureMapKind::pseudoinverse;
    throw CLI::ValidationError("--feature-map",
                               "expected degree, svd-projection or "
                               "oracle-pseudoinverse, got '" +
                                   name + "'");
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<Method> methods;
    for (const std::string& name : names) {
        const auto method = graphpred::parse_method(name);
        if (!method)
            throw CLI::ValidationError("--methods", "unknown method '" + name + "'");
        methods.push_back(*method);
    }
    return methods;
}

GridSpec grid_from_json(const json& j) {
    GridSpec grid;
    if (!j.is_object())
        throw std::invalid_argument(
            "grid: expected an object with tau/gamma/kappa/rank lists");
    if (j.contains("tau")) grid.tau = j["tau"].get<std::vector<double>>();
    if (j.contains("gamma")) grid.gamma = j["gamma"].get<std::vector<double>>();
    if (j.contains("kappa")) grid.kappa = j["kappa"].get<std::vector<double>>();
    if (j.contains("rank")) grid.rank = j["rank"].get<std::vector<Eigen::Index>>();
    return grid;
}

GridSpec load_grid_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open grid file: " + path.string());
    json j;
    in >> j;
    return grid_from_json(j);
}

/// Default output location: --out flag, else $GRAPHPRED_OUT_DIR/<name>,
/// else ./<name>.
std::filesystem::path resolve_out(const std::string& flag_value,
                                  const std::string& default_name) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("GRAPHPRED_OUT_DIR"))
        return std::filesystem::path(env) / default_name;
    return default_name;
}

/// Settings a config file may provide; command-line flags override them.
void apply_config_file(ExperimentConfig& config, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
    json j;
    in >> j;

    auto& g = config.generator;
    g.n = j.value("n", g.n);
    g.T = j.value("t", g.T);
    g.r = j.value("r", g.r);
    g.sigma = j.value("sigma", g.sigma);
    g.sparsity = j.value("sparsity", g.sparsity);
    if (j.contains("noise-threshold"))
        g.noise_threshold = j["noise-threshold"].get<double>();
    g.spectral_target = j.value("spectral-target", g.spectral_target);
    g.latent_scale = j.value("latent-scale", g.latent_scale);
    g.mixing = j.value("mixing", g.mixing);
    g.seed = j.value("seed", g.seed);

    config.replications = j.value("replications", config.replications);
    if (j.contains("methods"))
        config.methods = parse_methods(j["methods"].get<std::vector<std::string>>());
    if (j.contains("feature-map"))
        config.map_kind = parse_map_kind(j["feature-map"].get<std::string>());
    config.feature_dim = j.value("feature-dim", config.feature_dim);
    config.hyper.tau = j.value("tau", config.hyper.tau);
    config.hyper.gamma = j.value("gamma", config.hyper.gamma);
    config.hyper.kappa = j.value("kappa", config.hyper.kappa);
    config.hyper.rank = j.value("rank", config.hyper.rank);
    config.use_cv = j.value("cv", config.use_cv);
    config.folds = j.value("folds", config.folds);
    if (j.contains("grid")) config.grid = grid_from_json(j["grid"]);
    if (j.contains("step")) config.solver.step = j["step"].get<double>();
    config.solver.max_iters = j.value("max-iters", config.solver.max_iters);
    config.solver.rel_tol = j.value("rel-tol", config.solver.rel_tol);
    config.jobs = j.value("jobs", config.jobs);
    if (j.contains("out")) config.out = j["out"].get<std::string>();
    if (j.contains("data")) config.data_dir = j["data"].get<std::string>();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"temporal link prediction on evolving graphs"};
    app.require_subcommand(1);

    // config files are applied before flag parsing, so flags win
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with defaults")
        ->expected(1);

    ExperimentConfig config;
    std::string out_flag, data_flag, map_flag;
    std::vector<std::string> method_names;
    double step_flag = 0.0;
    std::string grid_path;

    CLI::App* generate = app.add_subcommand("generate", "write synthetic datasets");
    generate->add_option("--n", config.generator.n, "node count");
    generate->add_option("--t", config.generator.T, "observed transitions");
    generate->add_option("--r", config.generator.r, "latent rank");
    generate->add_option("--sigma", config.generator.sigma, "noise std-dev");
    generate->add_option("--sparsity", config.generator.sparsity,
                         "nonzero fraction of the latent factors");
    double threshold_flag = -1.0;
    generate->add_option("--noise-threshold", threshold_flag,
                         "soft-threshold level for the noise (default: sigma)");
    generate->add_option("--spectral-target", config.generator.spectral_target,
                         "operator norm of the transition");
    generate->add_option("--latent-scale", config.generator.latent_scale,
                         "value scale of the initial latent state");
    generate->add_option("--mixing", config.generator.mixing,
                         "off-diagonal transition weight");
    generate->add_option("--seed", config.generator.seed, "base RNG seed");
    generate->add_option("--replications", config.replications,
                         "independent instances (seeds seed+0..seed+k-1)");
    generate->add_option("--out", out_flag, "output dataset directory");

    CLI::App* run = app.add_subcommand("run", "fit methods and score predictions");
    run->add_option("--data", data_flag, "dataset directory")->required();
    run->add_option("--methods", method_names, "comma-separated method list")
        ->delimiter(',');
    run->add_option("--tau", config.hyper.tau, "trace-norm weight");
    run->add_option("--gamma", config.hyper.gamma, "graph l1 weight");
    run->add_option("--kappa", config.hyper.kappa, "transition l1 weight");
    run->add_option("--rank", config.hyper.rank,
                    "factorization / low-rank baseline rank (default: dataset r)");
    run->add_flag("--cv", config.use_cv, "select hyperparameters by cross-validation");
    run->add_option("--folds", config.folds, "cross-validation folds");
    run->add_option("--grid", grid_path, "JSON grid file for --cv");
    run->add_option("--feature-map", map_flag,
                    "degree | svd-projection | oracle-pseudoinverse");
    run->add_option("--feature-dim", config.feature_dim,
                    "projection feature dimension (default: dataset r)");
    run->add_option("--step", step_flag, "explicit solver step size");
    run->add_option("--max-iters", config.solver.max_iters, "solver iteration cap");
    run->add_option("--rel-tol", config.solver.rel_tol, "solver stopping tolerance");
    run->add_option("--jobs", config.jobs, "parallel replications");
    run->add_option("--out", out_flag, "output results file (JSON lines)");

    CLI::App* sweep = app.add_subcommand("sweep", "evaluate a hyperparameter grid");
    sweep->add_option("--data", data_flag, "dataset directory")->required();
    sweep->add_option("--grid", grid_path, "JSON grid file");
    sweep->add_option("--methods", method_names, "comma-separated method list")
        ->delimiter(',');
    sweep->add_option("--folds", config.folds, "validation folds");
    sweep->add_option("--feature-map", map_flag,
                      "degree | svd-projection | oracle-pseudoinverse");
    sweep->add_option("--feature-dim", config.feature_dim,
                      "projection feature dimension (default: dataset r)");
    sweep->add_option("--rank", config.hyper.rank,
                      "base rank when the grid has none");
    sweep->add_option("--max-iters", config.solver.max_iters, "solver iteration cap");
    sweep->add_option("--rel-tol", config.solver.rel_tol, "solver stopping tolerance");
    sweep->add_option("--jobs", config.jobs, "parallel replications");
    sweep->add_option("--out", out_flag, "output records file (JSON lines)");

    CLI::App* report = app.add_subcommand("report", "aggregate result files");
    std::vector<std::string> report_inputs;
    report->add_option("files", report_inputs, "results files (JSON lines)")
        ->required();
    report->add_option("--out", out_flag, "output CSV path");

    try {
        // first pass picks up --config so the main parse can override it
        for (int i = 1; i + 1 < argc; ++i)
            if (std::string(argv[i]) == "--config") {
                apply_config_file(config, argv[i + 1]);
                break;
            }
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }

    try {
        if (!method_names.empty()) config.methods = parse_methods(method_names);
        if (config.methods.empty())
            config.methods = {Method::nn, Method::shrink, Method::gfb,
                              Method::factorized};
        if (!map_flag.empty()) config.map_kind = parse_map_kind(map_flag);
        if (threshold_flag >= 0.0) config.generator.noise_threshold = threshold_flag;
        if (step_flag > 0.0) config.solver.step = step_flag;
        if (!grid_path.empty()) config.grid = load_grid_file(grid_path);
        if (!data_flag.empty()) config.data_dir = data_flag;

        if (*generate) {
            config.out = resolve_out(out_flag, "dataset");
            return graphpred::harness::cmd_generate(config);
        }
        if (*run) {
            config.out = resolve_out(out_flag, "results.jsonl");
            return graphpred::harness::cmd_run(config);
        }
        if (*sweep) {
            config.out = resolve_out(out_flag, "sweep.jsonl");
            return graphpred::harness::cmd_sweep(config);
        }
        if (*report) {
            std::vector<std::filesystem::path> inputs(report_inputs.begin(),
                                                      report_inputs.end());
            return graphpred::harness::cmd_report(inputs,
                                                  resolve_out(out_flag, "report.csv"));
        }
    } catch (const CLI::ValidationError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 2;
}
