#include "dynex/dsl.hpp"
#include "dynex/exploitation.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_ParseFlagship(benchmark::State& state) {
  const auto text = dynex::serialize_model(dynex::build_exploitation_model());
  for (auto _ : state)
    benchmark::DoNotOptimize(dynex::parse_model(text));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ParseFlagship);

void BM_SerializeFlagship(benchmark::State& state) {
  const auto model = dynex::build_exploitation_model();
  for (auto _ : state)
    benchmark::DoNotOptimize(dynex::serialize_model(model));
}
BENCHMARK(BM_SerializeFlagship);

} // namespace
