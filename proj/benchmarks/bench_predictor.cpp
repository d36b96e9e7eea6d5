// Copyright 2026 the ftrack authors
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


#include "ftrack/predictor.hpp"
#include "ftrack/synth.hpp"

namespace {

using namespace ftrack;

// One paper-sized window: 100 ms at 8 kHz, p=8, q=3 (32 unknowns).
Waveform bench_window_signal() {
  VowelSpec spec = corpus_vowel_spec(0, 120.0, 0.1, 8000, 1234);
  return synthesize_vowel(spec, phonation_preset("modal"), 1234).audio;
}

void BM_SolveL2(benchmark::State& state) {
  const Waveform w = bench_window_signal();
  const AnalysisWindow window{&w, 0, w.size()};
  const DesignMatrices d = build_design(window, PredictorConfig{8, 3, Norm::l2});
  for (auto _ : state) benchmark::DoNotOptimize(solve_l2(d).objective);
}
BENCHMARK(BM_SolveL2);

void BM_SolveL1(benchmark::State& state) {
  const Waveform w = bench_window_signal();
  const AnalysisWindow window{&w, 0, w.size()};
  const DesignMatrices d = build_design(window, PredictorConfig{8, 3, Norm::l1});
  for (auto _ : state) benchmark::DoNotOptimize(solve_l1(d).objective);
}
BENCHMARK(BM_SolveL1);

void BM_BuildDesign(benchmark::State& state) {
  const Waveform w = bench_window_signal();
  const AnalysisWindow window{&w, 0, w.size()};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        build_design(window, PredictorConfig{8, 3, Norm::l2}).regressors.sum());
}
BENCHMARK(BM_BuildDesign);

}  // namespace
