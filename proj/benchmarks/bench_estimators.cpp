#include <benchmark/benchmark.h>

#include "levyou/coupling.hpp"
#include "levyou/harnack.hpp"
#include "levyou/linmodel.hpp"

using namespace levyou;

namespace {

struct Bench1D {
    OUModel model{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1)};
    LevyNoise noise = LevyNoise::pure_jump(JumpDensity::gaussian(1, 1.0, 1.0));
    ColumnSplit split = column_split(Eigen::MatrixXd::Ones(1, 1));
    CouplingConfig cfg = CouplingConfig::make(noise.jump0, split);
};

}  // namespace

static void BM_TvWeightBound(benchmark::State& state) {
    Bench1D b;
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(1);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, b.cfg.max_step);
    const double T = static_cast<double>(state.range(0));
    const std::int64_t replicas = 2000;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tv_weight_bound(b.model, b.noise, b.cfg, x, y, T,
                                                 replicas, RandomStream(1, 0), 1));
    }
    state.SetItemsProcessed(state.iterations() * replicas * state.range(0));
}
BENCHMARK(BM_TvWeightBound)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_MatrixExp(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Eigen::MatrixXd A = Eigen::MatrixXd::Random(n, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(matrix_exp(A, 0.7));
    }
}
BENCHMARK(BM_MatrixExp)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_ComputeVp(benchmark::State& state) {
    const JumpDensity g = JumpDensity::gaussian(1, 1.0, 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_vp(g, 2.0, 1.5));
    }
    state.SetLabel("Gaussian V_2(1.5)");
}
BENCHMARK(BM_ComputeVp)->Unit(benchmark::kMicrosecond);

static void BM_TvHistogram(benchmark::State& state) {
    RandomStream rs(5, 0);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<Eigen::VectorXd> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = Eigen::VectorXd::Constant(1, rs.normal());
        b[i] = Eigen::VectorXd::Constant(1, rs.normal() + 0.5);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(tv_histogram(a, b));
    }
}
BENCHMARK(BM_TvHistogram)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
