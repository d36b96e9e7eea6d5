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

#ifndef FTRACK_METRICS_HPP
#define FTRACK_METRICS_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ftrack/tracker.hpp"

namespace ftrack {

/// Detection needs BOTH deviations under their thresholds: relative below
/// tau_r and absolute below tau_a Hz. The defaults are this toolkit's own
/// calibration, not published values; reports always print the pair in use.
struct EvalThresholds {
  double tau_r = 0.15;
  double tau_a = 300.0;
};

struct LabelSpan {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string category;
};

/// Reference frames matched to their nearest hypothesis frame. A missing
/// value (either side) is a disengaged optional.
struct AlignedFrame {
  double time_s = 0.0;
  std::vector<std::optional<double>> ref_hz;
  std::vector<std::optional<double>> hyp_hz;
};

/// Matches each reference frame to the nearest hypothesis frame within half
/// the smaller hop. With labels, only reference frames inside a span of a
/// selected category survive. Throws when nothing aligns.
std::vector<AlignedFrame> align_tracks(
    const FormantTrack& hyp, const FormantTrack& ref,
    const std::vector<LabelSpan>* labels = nullptr,
    const std::set<std::string>* categories = nullptr);

/// Detection rate (percent) for formant index i (0-based): the share of
/// reference frames whose hypothesis lies within both thresholds. Frames
/// without a hypothesis count as undetected. Throws when no reference frame
/// carries formant i.
double fdr(const std::vector<AlignedFrame>& aligned, EvalThresholds t, int i);

/// Mean absolute deviation in Hz over frames where both reference and
/// hypothesis carry formant i. Throws when that set is empty.
double fee(const std::vector<AlignedFrame>& aligned, int i);

struct FormantScore {
  double fdr_percent = 0.0;
  double fee_hz = 0.0;
  int64_t fdr_frames = 0;  // reference frames considered
  int64_t fee_frames = 0;  // frames with both sides present
};

struct EvalReport {
  std::string name;
  std::vector<FormantScore> per_formant;
  int64_t aligned_frames = 0;
  EvalThresholds thresholds;

  /// Mean FEE over the first `count` formants that have any scored frames.
  double overall_fee(int count = 3) const;
};

EvalReport evaluate(const FormantTrack& hyp, const FormantTrack& ref,
                    EvalThresholds t = {},
                    const std::vector<LabelSpan>* labels = nullptr,
                    const std::set<std::string>* categories = nullptr,
                    const std::string& name = "");

/// Unweighted mean of the per-utterance scores, mirroring how corpus-level
/// rows are reported.
EvalReport summarize(const std::vector<EvalReport>& reports,
                     const std::string& name = "summary");

/// Fixed-width console table (one row per formant plus the overall average).
std::string render_report(const EvalReport& report);

/// CSV rendering: name,formant,fdr_percent,fee_hz,fdr_frames,fee_frames.
std::string report_csv(const EvalReport& report);

}  // namespace ftrack

#endif  // FTRACK_METRICS_HPP
