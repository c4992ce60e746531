#include <benchmark/benchmark.h>

#include "bridged/assignment.hpp"
#include "bridged/bridge.hpp"
#include "bridged/clustering.hpp"
#include "bridged/synth.hpp"
#include "bridged/transport.hpp"

using namespace bridged;

namespace {

MixtureSample sample(std::size_t n, int clusters = 5, int dim = 8) {
    const auto spec = make_separated_spec(clusters, dim, dim, 10.0, RngSeed{1});
    return sample_mixture(spec, n, RngSeed{2});
}

Matrix sq_dists(const Matrix& a, const Matrix& b) {
    Matrix d(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.rows(); ++j) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
    }
    return d;
}

void BM_Lloyd(benchmark::State& state) {
    const auto s = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_lloyd(s.x, 5, RngSeed{3}));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Lloyd)->RangeMultiplier(4)->Range(256, 16384)->Complexity(benchmark::oN);

void BM_Balanced(benchmark::State& state) {
    const auto s = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_balanced(s.x, 5, RngSeed{3}));
}
BENCHMARK(BM_Balanced)->RangeMultiplier(4)->Range(64, 1024);

void BM_Minibatch(benchmark::State& state) {
    const auto s = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fit_minibatch(s.x, 5, RngSeed{3}, 256));
}
BENCHMARK(BM_Minibatch)->RangeMultiplier(4)->Range(1024, 16384);

void BM_Hungarian(benchmark::State& state) {
    const auto n = state.range(0);
    const auto s = sample(static_cast<std::size_t>(n), 1, 4);
    const Matrix cost = sq_dists(s.x.points(), s.y.points());
    for (auto _ : state) benchmark::DoNotOptimize(solve_assignment(cost));
    state.SetComplexityN(n);
}
BENCHMARK(BM_Hungarian)->RangeMultiplier(2)->Range(8, 256)->Complexity(benchmark::oNCubed);

void BM_Sinkhorn(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto s = sample(n);
    Matrix cost = sq_dists(s.x.points(), s.y.points());
    cost /= cost.maxCoeff();
    const Vector w = uniform_weights(n);
    for (auto _ : state) benchmark::DoNotOptimize(sinkhorn(cost, w, w, 0.05, 50, 0.0));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Sinkhorn)->RangeMultiplier(2)->Range(128, 1024)->Complexity(benchmark::oNSquared);

void BM_GromovWasserstein(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto s = sample(n);
    Matrix dx = sq_dists(s.x.points(), s.x.points()).cwiseSqrt();
    Matrix dy = sq_dists(s.y.points(), s.y.points()).cwiseSqrt();
    dx /= dx.maxCoeff();
    dy /= dy.maxCoeff();
    const Vector w = uniform_weights(n);
    GwConfig cfg;
    cfg.eps = 2e-2;
    cfg.max_iter = 5;
    cfg.inner_max_iter = 100;
    for (auto _ : state) benchmark::DoNotOptimize(gw_align(dx, dy, w, w, cfg, RngSeed{4}));
}
BENCHMARK(BM_GromovWasserstein)->RangeMultiplier(2)->Range(64, 256);

}  // namespace

BENCHMARK_MAIN();
