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

#ifndef FTRACK_EXCITATION_HPP
#define FTRACK_EXCITATION_HPP

#include <cstdint>
#include <vector>

#include "ftrack/waveform.hpp"

namespace ftrack {

/// Glottal closure instants as ascending sample indices. Cycle n spans
/// [instants[n], instants[n+1]); a cycle is treated as voiced only when its
/// implied F0 = fs / T0 lies inside [60, 800] Hz.
struct GciSequence {
  std::vector<int64_t> instants;

  bool empty() const { return instants.empty(); }
  size_t cycle_count() const {
    return instants.size() < 2 ? 0 : instants.size() - 1;
  }
};

constexpr double kMinVoicedF0Hz = 60.0;
constexpr double kMaxVoicedF0Hz = 800.0;

/// Short-time-energy weighting parameters: w[n] sums x^2 over the M samples
/// ending D+1 samples in the past. Defaults are D=0, M=12 (1.5 ms at 8 kHz).
struct SteParams {
  int delay = 0;   // D
  int length = 12; // M
};

/// Glottal-cycle weighting geometry. Positions are fractions of the local
/// cycle length T0: the floor region starts at the GCI and lasts PQ*T0, the
/// unity plateau follows (with Nramp-sample linear edges) and ends when the
/// span of duration DQ*T0 measured from the end of the floor region runs out.
/// Everything after that until the next GCI stays at the floor dw.
struct QcpParams {
  double position_quotient = 0.05;  // PQ
  double duration_quotient = 0.8;   // DQ
  int ramp_samples = 3;             // Nramp, 0.375 ms at 8 kHz
  double floor = 1e-5;              // dw, keeps the weighted normal matrix nonsingular
};

/// Per-sample weights aligned with one AnalysisWindow (one weight per window
/// sample, i.e. per prediction-error sample).
struct WeightSeries {
  std::vector<double> weights;

  size_t size() const { return weights.size(); }
  double operator[](size_t i) const { return weights[i]; }
};

/// All-ones weights (plain LP / TVLP behaviour).
WeightSeries uniform_weights(const AnalysisWindow& window);

/// w[n] = sum_{k=D+1}^{D+M} x^2[n-k]; past samples outside the window come
/// from the parent waveform when present, else zero.
WeightSeries ste_weights(const AnalysisWindow& window, SteParams p = {});

/// Short-time energy of the stationary L2 LP residual, inverted and rescaled
/// to [0,1], floored at QcpParams{}.floor. A degenerate (constant) window
/// yields uniform weights.
WeightSeries residual_weights(const AnalysisWindow& window, int lp_order = 8);

/// Piecewise QCP weight built per glottal cycle; samples outside any voiced
/// cycle get weight 1, and an empty GCI sequence yields all-ones.
WeightSeries qcp_weights(const AnalysisWindow& window, const GciSequence& gcis,
                         QcpParams q = {});

/// Zero-frequency-resonator epoch detector: difference the signal, pass it
/// through two near-DC resonators, strip the trend with repeated mean removal
/// over 1.5 pitch-period windows and take the polarity-checked zero crossings.
/// Silence or aperiodic input yields an empty sequence.
GciSequence estimate_gci(const Waveform& w);

}  // namespace ftrack

#endif  // FTRACK_EXCITATION_HPP
