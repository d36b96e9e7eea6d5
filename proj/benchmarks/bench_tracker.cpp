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

#include "ftrack/synth.hpp"
#include "ftrack/tracker.hpp"

namespace {

using namespace ftrack;

struct Fixture {
  Waveform emphasized;
  GciSequence gcis;
};

const Fixture& one_second_vowel() {
  static const Fixture fixture = [] {
    const VowelSpec spec = corpus_vowel_spec(0, 120.0, 1.0, 8000, 99);
    const SynthesisResult vowel =
        synthesize_vowel(spec, phonation_preset("modal"), 99);
    Fixture f;
    f.emphasized = preemphasize(vowel.audio);
    for (double t : vowel.gci_times_s)
      f.gcis.instants.push_back(std::llround(t * 8000.0));
    return f;
  }();
  return fixture;
}

void BM_TrackQcpL1(benchmark::State& state) {
  const Fixture& f = one_second_vowel();
  for (auto _ : state) {
    const FormantTrack track = track_formants(f.emphasized, TrackerConfig{}, &f.gcis);
    benchmark::DoNotOptimize(track.frames.size());
  }
}
BENCHMARK(BM_TrackQcpL1)->Unit(benchmark::kMillisecond);

void BM_TrackStationaryL2(benchmark::State& state) {
  const Fixture& f = one_second_vowel();
  TrackerConfig cfg;
  cfg.predictor = PredictorConfig{8, 0, Norm::l2, WeightingKind::none};
  for (auto _ : state) {
    const FormantTrack track = track_formants(f.emphasized, cfg);
    benchmark::DoNotOptimize(track.frames.size());
  }
}
BENCHMARK(BM_TrackStationaryL2)->Unit(benchmark::kMillisecond);

void BM_EstimateGci(benchmark::State& state) {
  const Fixture& f = one_second_vowel();
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_gci(f.emphasized).instants.size());
}
BENCHMARK(BM_EstimateGci)->Unit(benchmark::kMillisecond);

}  // namespace
