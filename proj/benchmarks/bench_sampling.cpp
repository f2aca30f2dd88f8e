#include <benchmark/benchmark.h>

#include "levyou/density.hpp"
#include "levyou/levy.hpp"
#include "levyou/rng.hpp"

using namespace levyou;

static void BM_PhiloxUniform(benchmark::State& state) {
    RandomStream rs(1, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rs.uniform());
    }
}
BENCHMARK(BM_PhiloxUniform);

static void BM_PhiloxNormal(benchmark::State& state) {
    RandomStream rs(1, 0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rs.normal());
    }
}
BENCHMARK(BM_PhiloxNormal);

static void BM_Poisson(benchmark::State& state) {
    RandomStream rs(1, 0);
    const double lambda = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(rs.poisson(lambda));
    }
}
BENCHMARK(BM_Poisson)->Arg(2)->Arg(16)->Arg(256);

static void BM_JumpPath(benchmark::State& state) {
    const JumpDensity jd = JumpDensity::gaussian(1, 1.0, 1.0);
    RandomStream rs(1, 0);
    const double T = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_jump_path(jd, T, rs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_JumpPath)->Arg(4)->Arg(64)->Arg(256);

static void BM_OUTerminalState2D(benchmark::State& state) {
    Eigen::MatrixXd A(2, 2);
    A << -0.3, 0.4, -0.4, -0.2;
    const OUModel model{A, Eigen::MatrixXd::Identity(2, 2)};
    LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(2, 1.0, 2.0));
    noise.gaussian_cov = 0.5 * Eigen::MatrixXd::Identity(2, 2);
    const OUPropagator prop = make_propagator(model, noise, 1.0);
    RandomStream rs(1, 0);
    const Eigen::VectorXd x = Eigen::VectorXd::Ones(2);
    for (auto _ : state) {
        const JumpPath path = sample_jump_path(noise.jump0, 1.0, rs);
        benchmark::DoNotOptimize(ou_terminal_state(prop, model, path, nullptr, x, rs));
    }
}
BENCHMARK(BM_OUTerminalState2D);

BENCHMARK_MAIN();
