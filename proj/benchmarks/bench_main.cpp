#include "bqrec/basis.hpp"
#include "bqrec/localization.hpp"
#include "bqrec/permutations.hpp"
#include "bqrec/quadratic.hpp"
#include "bqrec/sine_integral.hpp"
#include "bqrec/tem.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

using namespace bqrec;

namespace {

Matrix random_matrix(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix A(n, n);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = nd(rng);
    return A;
}

void BM_DetByBlocks(benchmark::State& state) {
    const auto J = static_cast<std::size_t>(state.range(0)), K = static_cast<std::size_t>(state.range(1));
    const Matrix A = random_matrix(static_cast<Eigen::Index>(J * K), 1);
    for (auto _ : state) benchmark::DoNotOptimize(det_by_blocks(A, J, K));
}
BENCHMARK(BM_DetByBlocks)->Args({2, 2})->Args({2, 3})->Args({3, 2})->Args({2, 4})->Args({4, 2});

void BM_LuDeterminant(benchmark::State& state) {
    const Matrix A = random_matrix(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(lu_determinant(A));
}
BENCHMARK(BM_LuDeterminant)->Arg(4)->Arg(6)->Arg(8);

void BM_EnumerateClasses(benchmark::State& state) {
    const auto N = static_cast<std::size_t>(state.range(0)), J = static_cast<std::size_t>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(enumerate_classes(N, J));
}
BENCHMARK(BM_EnumerateClasses)->Args({6, 2})->Args({8, 2})->Args({8, 4});

void BM_SineIntegral(benchmark::State& state) {
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sine_integral(x));
        x = x > 200.0 ? -200.0 : x + 0.37;
    }
}
BENCHMARK(BM_SineIntegral);

void BM_QuadraticBlock(benchmark::State& state) {
    const int K = static_cast<int>(state.range(0));
    const auto basis = BasisFamily::monomial(K);
    const auto times = sample_times(basis.interval(), static_cast<std::size_t>(4 * K), 3);
    const Matrix F = eval_basis_columns(basis, times).transpose();
    for (auto _ : state) benchmark::DoNotOptimize(assemble_quadratic_block(F));
}
BENCHMARK(BM_QuadraticBlock)->Arg(3)->Arg(6)->Arg(12);

void BM_Localize(benchmark::State& state) {
    SimulationSpec spec;
    spec.basis = BasisFamily::monomial(static_cast<int>(state.range(0)));
    spec.N = static_cast<std::size_t>(state.range(1));
    spec.seed = 5;
    const Scenario sc = simulate_scenario(spec);
    for (auto _ : state) benchmark::DoNotOptimize(localize(sc));
}
BENCHMARK(BM_Localize)->Args({3, 11})->Args({3, 100})->Args({4, 15})->Args({4, 200});

void BM_TemSimulateDecode(benchmark::State& state) {
    TemConfig cfg;
    cfg.J = 2;
    cfg.K = 3;
    cfg.omega = std::numbers::pi;
    cfg.mixing = (Matrix(2, 2) << 1.0, 0.5, -0.4, 1.0).finished();
    cfg.machines.assign(2, TemMachine{1.0, 1.0, 1.0, -2.0});
    cfg.horizon = 4.0;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> nd;
    Matrix C(2, 3);
    for (Eigen::Index i = 0; i < C.size(); ++i) C.data()[i] = nd(rng);
    for (std::size_t i = 0; i < 2; ++i) {
        cfg.machines[i].bias = 1.5 * signal_bound(cfg, C, i) + 0.1;
        cfg.machines[i].delta = 0.15 * cfg.machines[i].bias;
    }
    for (auto _ : state) benchmark::DoNotOptimize(decode_tem(cfg, simulate_spikes(cfg, C)));
}
BENCHMARK(BM_TemSimulateDecode);

}  // namespace
BENCHMARK_MAIN();
