#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "graphpred/evaluation.hpp"
#include "graphpred/graph_gen.hpp"
#include "graphpred/objectives.hpp"
#include "graphpred/solvers.hpp"

using namespace graphpred;

namespace {

SyntheticInstance full_scale_instance() {
    GeneratorParams params;
    params.seed = 42;
    return generate(params);
}

ProblemData full_scale_problem() {
    const SyntheticInstance inst = full_scale_instance();
    const AdjacencySequence train = inst.observed();
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(inst.params.n, inst.params.n);
    for (const auto& a : train) cumulative += a;
    return ProblemData::from_sequence(train,
                                      fit_svd_projection(cumulative, inst.params.r));
}

void generate_bench(benchmark::State& state) {
    GeneratorParams params;
    params.seed = 42;
    for (auto _ : state) benchmark::DoNotOptimize(generate(params));
}

void gfb_solve_bench(benchmark::State& state) {
    const ProblemData data = full_scale_problem();
    Hyperparams params;
    params.tau = 0.1;
    params.gamma = 0.001;
    params.kappa = 0.3;
    SolverConfig config;
    config.max_iters = static_cast<int>(state.range(0));
    config.rel_tol = 1e-12;  // run the full budget
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_gfb(data, params, config));
}

void factorized_solve_bench(benchmark::State& state) {
    const ProblemData data = full_scale_problem();
    Hyperparams params;
    params.gamma = 0.001;
    params.kappa = 0.3;
    SolverConfig config;
    config.max_iters = static_cast<int>(state.range(0));
    config.rel_tol = 1e-12;
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_factorized(data, params, 5, config));
}

void nn_scores_bench(benchmark::State& state) {
    const ProblemData data = full_scale_problem();
    for (auto _ : state) benchmark::DoNotOptimize(nn_scores(data.cumulative));
}

void auc_bench(benchmark::State& state) {
    const SyntheticInstance inst = full_scale_instance();
    Eigen::MatrixXd cumulative = Eigen::MatrixXd::Zero(inst.params.n, inst.params.n);
    for (const auto& a : inst.observed()) cumulative += a;
    const ScoreMatrix scores = nn_scores(cumulative);
    for (auto _ : state)
        benchmark::DoNotOptimize(auc(scores, inst.held_out()));
}

}  // namespace

BENCHMARK(generate_bench);
BENCHMARK(gfb_solve_bench)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(factorized_solve_bench)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(nn_scores_bench);
BENCHMARK(auc_bench);

BENCHMARK_MAIN();
