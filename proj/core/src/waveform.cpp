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

#include "ftrack/waveform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ftrack {
namespace {

// Zeroth-order modified Bessel function, power series. Converges fast for
// the argument range a Kaiser window needs.
double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double half_x = 0.5 * x;
  for (int k = 1; k < 64; ++k) {
    term *= (half_x / k) * (half_x / k);
    sum += term;
    if (term < 1e-18 * sum) break;
  }
  return sum;
}

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

void validate(const Waveform& w) {
  if (w.sample_rate_hz <= 0) throw Error("waveform: sample_rate_hz must be positive");
  for (double s : w.samples) {
    if (!std::isfinite(s)) throw Error("waveform: non-finite sample");
  }
}

Waveform preemphasize(const Waveform& w, PreemphasisCoeff c) {
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(w.samples.size());
  double prev = 0.0;
  for (size_t n = 0; n < w.samples.size(); ++n) {
    out.samples[n] = w.samples[n] - c.alpha * prev;
    prev = w.samples[n];
  }
  return out;
}

Waveform deemphasize(const Waveform& w, PreemphasisCoeff c) {
  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.resize(w.samples.size());
  double prev = 0.0;
  for (size_t n = 0; n < w.samples.size(); ++n) {
    prev = w.samples[n] + c.alpha * prev;
    out.samples[n] = prev;
  }
  return out;
}

Waveform resample(const Waveform& w, int target_hz) {
  if (target_hz <= 0) throw Error("resample: target rate must be positive");
  if (target_hz == w.sample_rate_hz) return w;
  if (w.samples.empty()) return Waveform{{}, target_hz};

  const int64_t src_hz = w.sample_rate_hz;
  const int64_t g = std::gcd<int64_t>(src_hz, target_hz);
  const int64_t up = target_hz / g;    // L
  const int64_t down = src_hz / g;     // M

  // Windowed-sinc interpolation at input-domain positions j*M/L. Cutoff
  // 0.45 * min(fs_in, fs_out); per-output normalization keeps DC gain exact
  // and removes edge droop.
  const double cutoff_hz = 0.45 * static_cast<double>(std::min<int64_t>(src_hz, target_hz));
  const double f_norm = cutoff_hz / static_cast<double>(src_hz);  // cycles/input-sample
  const int half_width = 48;
  const double beta = 10.0;
  const double i0_beta = bessel_i0(beta);

  const int64_t in_len = w.size();
  const int64_t out_len = static_cast<int64_t>(
      std::llround(static_cast<double>(in_len) * target_hz / static_cast<double>(src_hz)));

  Waveform out;
  out.sample_rate_hz = target_hz;
  out.samples.resize(static_cast<size_t>(out_len));

  for (int64_t j = 0; j < out_len; ++j) {
    const int64_t num = j * down;            // position = num / up input samples
    const int64_t base = num / up;
    const double frac = static_cast<double>(num % up) / static_cast<double>(up);
    double acc = 0.0, wsum = 0.0;
    for (int64_t n = base - half_width; n <= base + half_width + 1; ++n) {
      if (n < 0 || n >= in_len) continue;
      const double v = (static_cast<double>(base - n) + frac);  // position - n
      const double u = v / (half_width + 1.0);
      if (u <= -1.0 || u >= 1.0) continue;
      const double win = bessel_i0(beta * std::sqrt(1.0 - u * u)) / i0_beta;
      const double k = 2.0 * f_norm * sinc(2.0 * f_norm * v) * win;
      acc += k * w.samples[static_cast<size_t>(n)];
      wsum += k;
    }
    out.samples[static_cast<size_t>(j)] = wsum != 0.0 ? acc / wsum : 0.0;
  }
  return out;
}

std::vector<WindowFrames> frame_windows(const Waveform& w, double window_ms,
                                        double shift_ms) {
  if (!(shift_ms > 0.0) || window_ms < shift_ms)
    throw Error("frame_windows: need window_ms >= shift_ms > 0");
  const int64_t fs = w.sample_rate_hz;
  const int64_t win_len = std::max<int64_t>(1, std::llround(window_ms * 1e-3 * fs));
  const int64_t shift = std::max<int64_t>(1, std::llround(shift_ms * 1e-3 * fs));
  const int64_t len = w.size();
  if (len == 0) return {};

  struct Span { int64_t start, length; };
  std::vector<Span> spans;
  if (len <= win_len) {
    spans.push_back({0, len});
  } else {
    const int64_t full = len / win_len;
    for (int64_t i = 0; i < full; ++i) spans.push_back({i * win_len, win_len});
    const int64_t rem = len - full * win_len;
    if (rem > 0) {
      if (rem >= 2 * shift) {
        spans.push_back({full * win_len, rem});
      } else {
        spans.back().length += rem;  // merge trailing remainder
      }
    }
  }

  std::vector<WindowFrames> out;
  out.reserve(spans.size());
  for (const Span& s : spans) {
    WindowFrames wf;
    wf.window = AnalysisWindow{&w, s.start, s.length};
    for (int64_t pos = shift / 2; pos < s.length; pos += shift)
      wf.frame_instants.push_back(pos);
    if (wf.frame_instants.empty()) wf.frame_instants.push_back(s.length / 2);
    out.push_back(std::move(wf));
  }
  return out;
}

}  // namespace ftrack
