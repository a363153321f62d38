#include <random>

#include <benchmark/benchmark.h>

#include "conjlab/conjugacy.hpp"
#include "conjlab/regularity.hpp"
#include "conjlab/systems.hpp"

using namespace conjlab;

namespace {

std::vector<ProductState> points(const SemilinearSystem& sys, std::size_t n) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<ProductState> out(n);
    for (auto& s : out) {
        s.x.resize(sys.x_dim());
        s.y.resize(sys.y_dim());
        for (double& v : s.x) v = U(rng);
        for (double& v : s.y) v = U(rng);
    }
    return out;
}

void BM_VerifyConjugacy(benchmark::State& state) {
    const auto sys = make_builtin("toy-1-1");
    const auto pts = points(sys, 16);
    const std::vector<double> grid = {-1.0, 0.0, 1.0};
    VerifyOptions vo;
    vo.exec = state.range(0) ? Exec::openmp : Exec::serial;
    EngineOptions eo;
    eo.memoize = false;
    for (auto _ : state) {
        ConjugacyEngine engine(sys, eo);
        benchmark::DoNotOptimize(verify_conjugacy(engine, pts, grid, vo));
    }
    state.SetLabel(to_string(vo.exec) + ", " + std::to_string(available_threads()) + " threads");
}

void BM_EstimateExponent(benchmark::State& state) {
    const auto sys = make_builtin("toy-1-1");
    RegularityConfig rc;
    rc.n_base = 4;
    rc.exec = state.range(0) ? Exec::openmp : Exec::serial;
    EngineOptions eo;
    eo.memoize = false;
    for (auto _ : state) {
        ConjugacyEngine engine(sys, eo);
        benchmark::DoNotOptimize(
            estimate_exponent([&](const ProductState& u) { return engine.H_map(u); }, sys, Fiber::stable, rc));
    }
    state.SetLabel(to_string(rc.exec) + ", " + std::to_string(available_threads()) + " threads");
}

}  // namespace

BENCHMARK(BM_VerifyConjugacy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateExponent)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
