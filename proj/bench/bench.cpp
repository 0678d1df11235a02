// Parallel kernels against their serial runs and the brute-force graphlet
// reference. Thread count is the benchmark argument.

#include "netboot/ensemble.hpp"
#include "netboot/graphlets.hpp"
#include "netboot/netanalysis.hpp"

#include "support/simulate.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace netboot;

const SignedGraph& sparse_graph() {
    static const SignedGraph g = testsupport::random_sparse_graph(20000, 60000, 1);
    return g;
}

void BM_gdvm_unsigned(benchmark::State& state) {
    const auto threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gdvm_unsigned(sparse_graph(), threads));
}

void BM_gdvm_signed(benchmark::State& state) {
    const auto threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(gdvm_signed(sparse_graph(), threads));
}

// Small graph so the enumeration reference finishes.
void BM_gdvm_fast_small(benchmark::State& state) {
    const auto g = testsupport::random_signed_graph(40, 0.2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(gdvm_unsigned(g, 1));
}

void BM_gdvm_brute_small(benchmark::State& state) {
    const auto g = testsupport::random_signed_graph(40, 0.2, 3);
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle(g, 4, false));
}

void BM_betweenness(benchmark::State& state) {
    const auto threads = static_cast<int>(state.range(0));
    const auto g = testsupport::random_sparse_graph(2000, 6000, 5);
    std::vector<SignedEdge> edges;
    for (const auto& e : g.edges()) edges.push_back({e.u, e.v, static_cast<double>(e.sign), e.sign});
    for (auto _ : state) benchmark::DoNotOptimize(centrality(g.size(), edges, threads));
}

void BM_ensemble_ggm(benchmark::State& state) {
    const auto threads = static_cast<int>(state.range(0));
    const auto model = testsupport::random_sparse_model(30, 15, 0.35, 7);
    const auto d = testsupport::simulate_ggm(model.theta, 300, 9);
    const auto plan = make_plan(Strategy::bootstrap, 50, 0.8, 0.8, 11, SampleMeta::of(d));
    GgmEnsembleOptions opts;
    opts.threads = threads;
    for (auto _ : state) benchmark::DoNotOptimize(run_ensemble_ggm(d, plan, opts));
}

}  // namespace

BENCHMARK(BM_gdvm_unsigned)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gdvm_signed)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_gdvm_fast_small)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_gdvm_brute_small)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_betweenness)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ensemble_ggm)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
