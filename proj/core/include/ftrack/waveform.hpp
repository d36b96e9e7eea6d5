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

#ifndef FTRACK_WAVEFORM_HPP
#define FTRACK_WAVEFORM_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftrack {

/// Toolkit-wide error type. Everything recoverable throws this.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A sampled signal. Samples are nominally in [-1, 1] but nothing enforces
/// that beyond the WAV loader; intermediate products (excitations, residuals)
/// reuse the type with arbitrary amplitudes.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 0;

  int64_t size() const { return static_cast<int64_t>(samples.size()); }
  double duration_s() const {
    return sample_rate_hz > 0 ? static_cast<double>(size()) / sample_rate_hz : 0.0;
  }
  /// Sample access with zero-padded negative history.
  double at_or_zero(int64_t n) const {
    return (n >= 0 && n < size()) ? samples[static_cast<size_t>(n)] : 0.0;
  }
};

/// Throws Error unless sample_rate_hz > 0 and all samples are finite.
void validate(const Waveform& w);

/// A contiguous slice of a parent waveform. The parent must outlive the view.
/// Windows carry the absolute start so that analysis code can reach true
/// history samples before the window when they exist.
struct AnalysisWindow {
  const Waveform* source = nullptr;
  int64_t start_sample = 0;
  int64_t length_samples = 0;

  double sample(int64_t local_n) const {
    return source->samples[static_cast<size_t>(start_sample + local_n)];
  }
  /// Sample relative to window start; indices before the utterance are zero.
  double history(int64_t local_n) const {
    return source->at_or_zero(start_sample + local_n);
  }
};

struct PreemphasisCoeff {
  double alpha = 0.97;
};

/// Frame evaluation instants within one analysis window, expressed as
/// window-local sample indices (centers of shift-sized subframes).
struct WindowFrames {
  AnalysisWindow window;
  std::vector<int64_t> frame_instants;
};

/// y[n] = x[n] - alpha * x[n-1] with x[-1] = 0.
Waveform preemphasize(const Waveform& w, PreemphasisCoeff c = {});

/// Exact inverse of preemphasize (used by tests and resynthesis).
Waveform deemphasize(const Waveform& w, PreemphasisCoeff c = {});

/// Polyphase windowed-sinc resampling. Cutoff 0.45 * min(fs_in, fs_out),
/// Kaiser window. target_hz == sample_rate_hz returns a copy.
Waveform resample(const Waveform& w, int target_hz);

/// Tile the signal with non-overlapping windows of window_ms and place frame
/// instants every shift_ms at subframe centers. A trailing remainder becomes
/// its own window when it is at least 2 * shift_ms long, otherwise it is
/// merged into the previous window. A signal shorter than one window yields a
/// single window covering everything.
std::vector<WindowFrames> frame_windows(const Waveform& w, double window_ms,
                                        double shift_ms);

}  // namespace ftrack

#endif  // FTRACK_WAVEFORM_HPP
