// Size and round-trip cost of the compressed lineage format on captured
// tables, whose row-shaped record sets are its best case.

#include <benchmark/benchmark.h>

#include <string>

#include "bench_data.hpp"
#include "xprov/builtins.hpp"
#include "xprov/lineage_io.hpp"

using namespace xprov;

namespace {

LineageTable dropna_table(std::size_t rows) {
  Container c = benchdata::people(rows);
  OperationSignature o = OperationSignature::make("t", "dropna", {});
  Container out = execute_builtin(o, {c}, "out");
  return capture_exact_lineage(o, {c}, out);
}

void BM_CompressTable(benchmark::State& state) {
  LineageTable t = dropna_table(static_cast<std::size_t>(state.range(0)));
  std::string payload;
  for (auto _ : state) {
    payload = compress_table(t);
    benchmark::DoNotOptimize(payload);
  }
  state.counters["records"] = static_cast<double>(t.records().size());
  state.counters["bytes"] = static_cast<double>(payload.size());
}
BENCHMARK(BM_CompressTable)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_DecompressTable(benchmark::State& state) {
  LineageTable t = dropna_table(static_cast<std::size_t>(state.range(0)));
  std::string payload = compress_table(t);
  for (auto _ : state) {
    LineageTable back = decompress_table(payload);
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_DecompressTable)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_CsvRoundTrip(benchmark::State& state) {
  LineageTable t = dropna_table(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    std::string text = lineage_to_csv(t);
    LineageTable back = lineage_from_csv(
        text, t.input_schemas(), t.output_schema(),
        t.completeness(InfluenceKind::Direct),
        t.completeness(InfluenceKind::Indirect), t.origin());
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_CsvRoundTrip)->Arg(4)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
