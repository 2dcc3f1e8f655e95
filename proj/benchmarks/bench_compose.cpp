// Fusing per-hop lineage into a chain closure and querying the result.

#include <benchmark/benchmark.h>

#include <set>
#include <vector>

#include "bench_data.hpp"
#include "xprov/builtins.hpp"
#include "xprov/lineage.hpp"

using namespace xprov;

namespace {

struct Chain {
  std::vector<LineageTable> hops;
  Container last;
};

// dropna -> filter Age>30 -> map +1 over a rows x 4 table, captured per hop.
Chain demo_chain(std::size_t rows) {
  const std::vector<OperationSignature> ops = {
      OperationSignature::make("t", "dropna", {}),
      OperationSignature::make("t", "filter",
                               {{"column", Scalar::of("Age")},
                                {"cmp", Scalar::of(">")},
                                {"value", Scalar::of(std::int64_t{30})}}),
      OperationSignature::make("t", "map_add_constant",
                               {{"k", Scalar::of(std::int64_t{1})}}),
  };
  Chain chain;
  Container cur = benchdata::people(rows);
  for (const OperationSignature& o : ops) {
    Container out = execute_builtin(o, {cur}, "out");
    chain.hops.push_back(capture_exact_lineage(o, {cur}, out));
    cur = std::move(out);
  }
  chain.last = std::move(cur);
  return chain;
}

void BM_ComposeTwoHops(benchmark::State& state) {
  Chain chain = demo_chain(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    LineageTable fused = compose_tables(chain.hops[0], chain.hops[1]);
    benchmark::DoNotOptimize(fused);
  }
}
BENCHMARK(BM_ComposeTwoHops)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_ComposeChain(benchmark::State& state) {
  Chain chain = demo_chain(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    LineageTable fused = compose_tables(
        compose_tables(chain.hops[0], chain.hops[1]), chain.hops[2]);
    benchmark::DoNotOptimize(fused);
  }
}
BENCHMARK(BM_ComposeChain)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_QueryFusedBackward(benchmark::State& state) {
  Chain chain = demo_chain(static_cast<std::size_t>(state.range(0)));
  LineageTable fused = compose_tables(
      compose_tables(chain.hops[0], chain.hops[1]), chain.hops[2]);
  IndexTuple cell = {chain.last.dim(0).labels.front(), "Age"};
  for (auto _ : state) {
    std::set<IndexTuple> hits =
        query_table(fused, QuerySide::Backward, {cell}, InfluenceKind::Indirect);
    benchmark::DoNotOptimize(hits);
  }
  state.counters["fused_records"] = static_cast<double>(fused.records().size());
}
BENCHMARK(BM_QueryFusedBackward)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
