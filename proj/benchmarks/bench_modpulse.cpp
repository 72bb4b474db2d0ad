// Copyright 2026 The modpulse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <benchmark/benchmark.h>

#include "modpulse/conditions.hpp"
#include "modpulse/noise_paths.hpp"
#include "modpulse/simulate.hpp"
#include "modpulse/spec_io.hpp"
#include "modpulse/trajectory.hpp"

using namespace modpulse;

namespace {

const std::filesystem::path kData = MODPULSE_BENCH_DATA_DIR;

void BM_Propagate(benchmark::State& state, const char* name) {
  const SpecDocument d = find_dataset(name, kData);
  for (auto _ : state) benchmark::DoNotOptimize(propagate(d.spec).final_state());
}
BENCHMARK_CAPTURE(BM_Propagate, table2_pi, "table2-pi");
BENCHMARK_CAPTURE(BM_Propagate, table7_pi, "table7-pi");
BENCHMARK_CAPTURE(BM_Propagate, fig1_pi, "fig1-pi");

void BM_Residuals(benchmark::State& state, const char* name) {
  const SpecDocument d = find_dataset(name, kData);
  const NoiseModel n = d.noise_model();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_residuals(d.spec, d.order, n).residue());
}
BENCHMARK_CAPTURE(BM_Residuals, table2_pi, "table2-pi");
BENCHMARK_CAPTURE(BM_Residuals, table3_pi, "table3-pi");
BENCHMARK_CAPTURE(BM_Residuals, table7_pi, "table7-pi");
BENCHMARK_CAPTURE(BM_Residuals, fig3_pi, "fig3-pi");

void BM_SimulateStatic(benchmark::State& state) {
  const SpecDocument d = find_dataset("table3-pi", kData);
  const SlicedPropagator prop(d.spec, static_cast<int>(state.range(0)));
  const NoiseRealization r = sample_static(NoiseModel::general(), 1);
  for (auto _ : state) benchmark::DoNotOptimize(prop.correction(r, 0.1));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulateStatic)->Arg(1000)->Arg(10000);

void BM_SampleOu(benchmark::State& state) {
  const SpecDocument d = find_dataset("table3-pi", kData);
  const SlicedPropagator prop(d.spec, default_slices(d.spec));
  NoiseModel n = NoiseModel::general();
  n.tau_c = 10;
  std::uint64_t k = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_ou(n, prop.sample_times(), path_seed(1, k++)).samples());
}
BENCHMARK(BM_SampleOu);

}  // namespace

BENCHMARK_MAIN();
