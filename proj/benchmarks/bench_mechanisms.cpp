#include <benchmark/benchmark.h>

#include "contmech/known_domain.hpp"
#include "contmech/meta_algo.hpp"
#include "contmech/sparse_gumb.hpp"
#include "contmech/stream_lab.hpp"
#include "contmech/tree_mechanism.hpp"
#include "contmech/unknown_continual.hpp"
#include "contmech/unknown_oneshot.hpp"

using namespace contmech;

namespace {

EventStream zipf(std::size_t d, std::int64_t T) {
  StreamSpec spec;
  spec.d = d;
  spec.T = T;
  spec.seed = 1;
  return generate(spec);
}

void BM_TreeCounterStep(benchmark::State& state) {
  const std::int64_t T = state.range(0);
  const int r = static_cast<int>(state.range(1));
  for (auto _ : state) {
    TreeCounter c(TreeParams(T, r, 1.0), NoiseSource(1));
    double acc = 0;
    for (std::int64_t t = 0; t < T; ++t) acc += c.step((t & 3) == 0);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_TreeCounterStep)->Args({1 << 10, 2})->Args({1 << 16, 2})->Args({1 << 16, 6});

void BM_KnownBaseRound(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const std::int64_t T = 1000;
  const EventStream s = zipf(d, T);
  for (auto _ : state) {
    KnownBase kb(Domain(make_domain(d)), TreeParams(T, 2, 1.0), 1, NoiseSource(2));
    for (const auto& ev : s) benchmark::DoNotOptimize(kb.step(ev));
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_KnownBaseRound)->Arg(10)->Arg(100);

void BM_SparseGumbRound(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const std::int64_t T = 1000;
  const EventStream s = zipf(d, T);
  SparseGumbConfig c;
  c.s = 3;
  c.T = T;
  c.eta = {recommended_eta(c, d, T, 0.05)};
  for (auto _ : state) {
    SparseGumb sg(Domain(make_domain(d)), c, NoiseSource(3));
    for (const auto& ev : s) benchmark::DoNotOptimize(sg.step(ev));
  }
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_SparseGumbRound)->Arg(10)->Arg(100)->Arg(1000);

void BM_UnkBaseRound(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const std::int64_t T = 1000;
  const EventStream s = zipf(d, T);
  UnkBaseConfig c;
  c.tree = TreeParams(T, 2, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(unk_base(s, c, NoiseSource(4)));
  state.SetItemsProcessed(state.iterations() * T);
}
BENCHMARK(BM_UnkBaseRound)->Arg(10)->Arg(100);

void BM_MetaRound(benchmark::State& state) {
  const Quadrant q = static_cast<Quadrant>(state.range(0));
  const std::int64_t T = 1000;
  const EventStream s = zipf(50, T);
  MetaConfig c;
  c.quadrant = q;
  c.tree = TreeParams(T, 2, 1.0);
  if (q == Quadrant::KnownRestricted || q == Quadrant::KnownUnrestricted) c.domain = make_domain(50);
  c.k_bar = 5;
  for (auto _ : state) benchmark::DoNotOptimize(meta_run(s, c, NoiseSource(5)));
  state.SetItemsProcessed(state.iterations() * T);
  state.SetLabel(std::string(to_string(q)));
}
BENCHMARK(BM_MetaRound)->DenseRange(0, 3);

void BM_UnkGauss(benchmark::State& state) {
  LabeledHistogram h;
  for (const auto& l : make_domain(1000)) h.set(l, static_cast<Count>(l.back() - '0') * 7 + 1);
  const LimitedHistogram lim = LimitedHistogram::from_histogram(h, 10);
  std::uint64_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(unk_gauss(lim, 1.0, 1e-6, NoiseSource(++i)));
}
BENCHMARK(BM_UnkGauss);

void BM_OptimalBase(benchmark::State& state) {
  const std::int64_t T = state.range(0);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_base(T));
}
BENCHMARK(BM_OptimalBase)->Arg(1000)->Arg(10'000'000);

}  // namespace

BENCHMARK_MAIN();
