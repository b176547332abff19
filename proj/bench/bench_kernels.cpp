#include <benchmark/benchmark.h>

#include <map>

#include "tensprov/bench.hpp"
#include "tensprov/kernels.hpp"
#include "tensprov/ops.hpp"

using namespace tensprov;

namespace {

struct Fixture {
  Dataset left, right;
  ProvTensor join, mask;
};

// Join of the synthetic tables, then a filter over its output.
const Fixture& fixture(std::size_t sf) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(sf);
  if (it != cache.end()) return it->second;
  BenchConfig c;
  c.scale_factor = sf;
  auto [l, r] = generate_tables(c);
  const auto key_l = l.schema().position_of("CustomerID");
  const auto key_r = r.schema().position_of("CustomerID");
  auto j = join({"j", "jo"}, l, r, {{{key_l, key_r}}, JoinKind::Inner});
  std::vector<RowIndex> kept;
  for (RowIndex k = 0; k < j.output.row_count(); k += 2) kept.push_back(k);
  ProvTensor mask = masking_tensor("jo", "half", j.output.row_count(), kept);
  return cache[sf] = {std::move(l), std::move(r), std::move(j.tensors.at(0).tensor), std::move(mask)};
}

void BM_HashRows(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::hash_rows(f.left));
  state.SetItemsProcessed(state.iterations() * f.left.row_count());
}

void BM_HashRowsSerial(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::hash_rows_serial(f.left));
  state.SetItemsProcessed(state.iterations() * f.left.row_count());
}

void BM_Compose(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::compose_leaves(f.join, f.mask, 1));
}

void BM_ComposeSerial(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::compose_leaves_serial(f.join, f.mask, 1));
}

void BM_ForwardAll(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forward_all(f.join, 1, 0, f.left.row_count()));
}

void BM_ForwardAllSerial(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::forward_all_serial(f.join, 1, 0, f.left.row_count()));
}

}  // namespace

BENCHMARK(BM_HashRows)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_HashRowsSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Compose)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ComposeSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ForwardAll)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ForwardAllSerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
