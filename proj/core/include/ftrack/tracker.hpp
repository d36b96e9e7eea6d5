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

#ifndef FTRACK_TRACKER_HPP
#define FTRACK_TRACKER_HPP

#include <optional>
#include <vector>

#include "ftrack/excitation.hpp"
#include "ftrack/predictor.hpp"
#include "ftrack/waveform.hpp"

namespace ftrack {

struct FormantEstimate {
  double frequency_hz = 0.0;
  double bandwidth_hz = 0.0;
};

/// One evaluation instant. Slot i holds formant i+1; slots are engaged in
/// ascending frequency order and trailing slots may be missing (a frame can
/// also be entirely empty when the fit failed or found no peaks).
struct FormantFrame {
  double time_s = 0.0;
  std::vector<std::optional<FormantEstimate>> formants;
  int window_id = -1;
};

struct TrackerConfig {
  PredictorConfig predictor{8, 3, Norm::l1, WeightingKind::qcp};
  double window_ms = 100.0;
  double shift_ms = 10.0;
  int max_formants = 4;
  int grid_size = 1024;
  SteParams ste;
  QcpParams qcp;
};

struct FormantTrack {
  std::vector<FormantFrame> frames;
  int sample_rate_hz = 0;
  TrackerConfig config;
};

/// |1 / A(e^{jw}; n)|^2 on a uniform grid of grid_size points spanning
/// [0, fs/2], both endpoints included.
std::vector<double> spectrum_at(const TvModel& model, int64_t n, int grid_size,
                                double sample_rate_hz);

/// Interior spectral peaks in (50, fs/2 - 50) Hz, refined by quadratic
/// interpolation of the log power. When fewer than max_formants peaks exist,
/// complex roots of A(z) with bandwidth -(fs/pi) ln|r| in (0, 700) Hz fill in
/// (candidates within 50 Hz of an existing entry are dropped). Bandwidths
/// come from the nearest model root when one is close, else from the peak's
/// half-power width.
std::vector<FormantEstimate> pick_formants(const std::vector<double>& spectrum,
                                           double sample_rate_hz,
                                           int max_formants,
                                           const Eigen::VectorXd& lpc);

/// Full single-pass tracker: tile the signal into windows, build the
/// configured weighting (estimating GCIs when QCP weighting is requested and
/// none are supplied), fit one time-varying model per window and read the
/// formants at every frame instant. The input is expected to be at the target
/// rate and pre-emphasized already. Windows whose fit fails contribute empty
/// frames and a diagnostic on stderr.
FormantTrack track_formants(const Waveform& w, const TrackerConfig& cfg,
                            const GciSequence* gcis = nullptr);

}  // namespace ftrack

#endif  // FTRACK_TRACKER_HPP
