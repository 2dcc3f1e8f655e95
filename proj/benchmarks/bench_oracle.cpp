// Cost of deriving an influence table from a black box by perturbation
// probing, against the analytic capture of the same operation.

#include <benchmark/benchmark.h>

#include <vector>

#include "bench_data.hpp"
#include "xprov/builtins.hpp"
#include "xprov/oracle.hpp"

using namespace xprov;

namespace {

RunFn builtin_fn(const OperationSignature& o) {
  return [o](const std::vector<Container>& inputs) {
    return execute_builtin(o, inputs, "out");
  };
}

OperationSignature filter_adults() {
  return OperationSignature::make(
      "t", "filter",
      {{"column", Scalar::of("Age")},
       {"cmp", Scalar::of(">")},
       {"value", Scalar::of(std::int64_t{30})}});
}

void BM_OracleDropna(benchmark::State& state) {
  Container c = benchdata::people(static_cast<std::size_t>(state.range(0)));
  RunFn fn = builtin_fn(OperationSignature::make("t", "dropna", {}));
  OracleStats stats;
  for (auto _ : state) {
    LineageTable t = influence_oracle(fn, {c}, &stats);
    benchmark::DoNotOptimize(t);
  }
  state.counters["execs"] = static_cast<double>(stats.executions);
}
BENCHMARK(BM_OracleDropna)->Arg(2)->Arg(4)->Arg(8);

void BM_OracleFilter(benchmark::State& state) {
  Container c = benchdata::people(static_cast<std::size_t>(state.range(0)));
  RunFn fn = builtin_fn(filter_adults());
  OracleStats stats;
  for (auto _ : state) {
    LineageTable t = influence_oracle(fn, {c}, &stats);
    benchmark::DoNotOptimize(t);
  }
  state.counters["execs"] = static_cast<double>(stats.executions);
}
BENCHMARK(BM_OracleFilter)->Arg(2)->Arg(4)->Arg(8);

void BM_AnalyticCapture(benchmark::State& state) {
  Container c = benchdata::people(static_cast<std::size_t>(state.range(0)));
  OperationSignature o = filter_adults();
  Container out = execute_builtin(o, {c}, "out");
  for (auto _ : state) {
    LineageTable t = capture_exact_lineage(o, {c}, out);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_AnalyticCapture)->Arg(8)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
