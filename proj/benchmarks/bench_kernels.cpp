#include <benchmark/benchmark.h>

#include <random>

#include <Eigen/Dense>

#include "graphpred/linear_operator.hpp"
#include "graphpred/matrix_kernels.hpp"
#include "graphpred/objectives.hpp"
#include "graphpred/rng.hpp"

using namespace graphpred;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    return gaussian_matrix(n, n, gen);
}

void soft_threshold_bench(benchmark::State& state) {
    const Eigen::MatrixXd z = random_matrix(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(soft_threshold(z, 0.3));
}

void svd_shrink_bench(benchmark::State& state) {
    const Eigen::MatrixXd z = random_matrix(state.range(0), 2);
    for (auto _ : state) benchmark::DoNotOptimize(svd_shrink(z, 0.3));
}

void compute_svd_bench(benchmark::State& state) {
    const Eigen::MatrixXd z = random_matrix(state.range(0), 3);
    for (auto _ : state) benchmark::DoNotOptimize(compute_svd(z));
}

void project_tangent_bench(benchmark::State& state) {
    std::mt19937_64 gen(4);
    const Eigen::Index n = state.range(0);
    const Eigen::MatrixXd s = gaussian_matrix(n, 3, gen) * gaussian_matrix(3, n, gen);
    const SvdFactors factors = compute_svd(s);
    const Eigen::MatrixXd b = gaussian_matrix(n, n, gen);
    for (auto _ : state) benchmark::DoNotOptimize(project_tangent(b, factors));
}

void operator_norm_bench(benchmark::State& state) {
    const Eigen::MatrixXd m = random_matrix(state.range(0), 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(operator_norm(DenseOperator{m}, 5000, 1e-8, 7));
}

}  // namespace

BENCHMARK(soft_threshold_bench)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(svd_shrink_bench)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(compute_svd_bench)->Arg(50)->Arg(100)->Arg(200);
BENCHMARK(project_tangent_bench)->Arg(100)->Arg(200);
BENCHMARK(operator_norm_bench)->Arg(50)->Arg(200);

BENCHMARK_MAIN();
