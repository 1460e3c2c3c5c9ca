#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "pfwd/binom.hpp"
#include "pfwd/estimator.hpp"
#include "pfwd/graph.hpp"
#include "pfwd/percolation.hpp"
#include "pfwd/protocol.hpp"
#include "pfwd/tree_analysis.hpp"

namespace {

void BM_ThresholdSolve(benchmark::State& state) {
  const pfwd::Graph g = pfwd::build_grid(static_cast<int>(state.range(0)));
  const pfwd::ForwardingOptions opts;
  const auto field = pfwd::ThresholdField::from_seed(7, g.vertex_count(), g.source(), 1);
  pfwd::ThresholdSolver solver(g, opts);
  pfwd::PacketThresholds out;
  for (auto _ : state) {
    solver.solve(field, 0, out);
    benchmark::DoNotOptimize(out.receive_at.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.vertex_count()));
}
BENCHMARK(BM_ThresholdSolve)->Arg(31)->Arg(101);

void BM_RunTrial(benchmark::State& state) {
  const pfwd::Graph g = pfwd::build_grid(31);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    auto o = pfwd::run_trial(g, 100, 20, 0.7, seed++, {});
    benchmark::DoNotOptimize(o.successful_receivers);
  }
}
BENCHMARK(BM_RunTrial);

void BM_LabelClusters(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto field = pfwd::sample_field(m, 0.6, 11);
  for (auto _ : state) {
    auto labels = pfwd::label_clusters(field);
    benchmark::DoNotOptimize(labels.sizes.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(m) * m);
}
BENCHMARK(BM_LabelClusters)->Arg(101)->Arg(301)->Arg(501);

void BM_BinomCdf(benchmark::State& state) {
  const long long n = state.range(0);
  double p = 0.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pfwd::binom_cdf(n, p, n / 2));
    p = p < 0.9 ? p + 1e-4 : 0.3;
  }
}
BENCHMARK(BM_BinomCdf)->Arg(100)->Arg(10000);

void BM_TreePmin(benchmark::State& state) {
  const pfwd::TreeSpec s{2, 50, 100, 150, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(pfwd::tree_pmin(s));
}
BENCHMARK(BM_TreePmin);

void BM_PminSweep(benchmark::State& state) {
  const pfwd::Graph g = pfwd::build_grid(15);
  const std::array<int, 3> ns{20, 30, 40};
  for (auto _ : state) {
    auto r = pfwd::mc_pmin_sweep(g, 10, 0.1, ns, 50, 1e-3, 3);
    benchmark::DoNotOptimize(r.data());
  }
}
BENCHMARK(BM_PminSweep)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
