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

#include "ftrack/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ftrack/predictor.hpp"

namespace ftrack {
namespace {

// Moving average with a centered window; shrinks at the edges.
std::vector<double> moving_mean(const std::vector<double>& x, int64_t half) {
  const int64_t n = static_cast<int64_t>(x.size());
  std::vector<double> prefix(n + 1, 0.0);
  for (int64_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];
  std::vector<double> out(n);
  for (int64_t i = 0; i < n; ++i) {
    const int64_t lo = std::max<int64_t>(0, i - half);
    const int64_t hi = std::min<int64_t>(n - 1, i + half);
    out[i] = (prefix[hi + 1] - prefix[lo]) / static_cast<double>(hi - lo + 1);
  }
  return out;
}

// Strongest normalized autocorrelation peak over the voiced lag range.
// Returns {lag, score}; score near zero means no periodicity.
std::pair<int64_t, double> dominant_period(const std::vector<double>& x, int fs) {
  const int64_t n = static_cast<int64_t>(x.size());
  const int64_t min_lag = std::max<int64_t>(2, static_cast<int64_t>(fs / kMaxVoicedF0Hz));
  const int64_t max_lag = std::min<int64_t>(n / 2, static_cast<int64_t>(fs / kMinVoicedF0Hz));
  if (max_lag <= min_lag) return {0, 0.0};
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  double r0 = 0.0;
  for (double v : x) r0 += (v - mean) * (v - mean);
  if (r0 <= 0.0) return {0, 0.0};
  int64_t best_lag = 0;
  double best = 0.0;
  for (int64_t lag = min_lag; lag <= max_lag; ++lag) {
    double r = 0.0;
    for (int64_t i = lag; i < n; ++i) r += (x[i] - mean) * (x[i - lag] - mean);
    const double score = r / r0;
    if (score > best) {
      best = score;
      best_lag = lag;
    }
  }
  return {best_lag, best};
}

void fill_cycle(std::vector<double>* out, const AnalysisWindow& window,
                int64_t gci, int64_t t0, const QcpParams& q) {
  const int64_t floor_len = std::llround(q.position_quotient * static_cast<double>(t0));
  int64_t span_end = floor_len + std::llround(q.duration_quotient * static_cast<double>(t0));
  span_end = std::min(span_end, t0);
  // A ramp exists only where there is a floor region to climb out of.
  const int64_t up_ramp = floor_len > 0 ? std::max<int64_t>(0, q.ramp_samples) : 0;
  const int64_t down_ramp = span_end < t0 ? std::max<int64_t>(0, q.ramp_samples) : 0;
  const double dw = q.floor;

  for (int64_t j = 0; j < t0; ++j) {
    const int64_t local = gci + j - window.start_sample;
    if (local < 0 || local >= window.length_samples) continue;
    double value = dw;
    if (j >= floor_len && j < span_end) {
      const int64_t up = j - floor_len;       // samples into the DQ span
      const int64_t down = span_end - 1 - j;  // samples before it ends
      value = 1.0;
      if (up < up_ramp)
        value = std::min(value, dw + (1.0 - dw) * static_cast<double>(up + 1) /
                                    static_cast<double>(up_ramp + 1));
      if (down < down_ramp)
        value = std::min(value, dw + (1.0 - dw) * static_cast<double>(down + 1) /
                                    static_cast<double>(down_ramp + 1));
    }
    (*out)[static_cast<size_t>(local)] = value;
  }
}

}  // namespace

WeightSeries uniform_weights(const AnalysisWindow& window) {
  return WeightSeries{std::vector<double>(
      static_cast<size_t>(window.length_samples), 1.0)};
}

WeightSeries ste_weights(const AnalysisWindow& window, SteParams p) {
  if (p.length < 1) throw Error("ste_weights: length M must be >= 1");
  WeightSeries out;
  out.weights.resize(static_cast<size_t>(window.length_samples));
  for (int64_t n = 0; n < window.length_samples; ++n) {
    double acc = 0.0;
    for (int k = p.delay + 1; k <= p.delay + p.length; ++k) {
      const double x = window.history(n - k);
      acc += x * x;
    }
    out.weights[static_cast<size_t>(n)] = acc;
  }
  return out;
}

WeightSeries residual_weights(const AnalysisWindow& window, int lp_order) {
  const double dw = QcpParams{}.floor;
  WeightSeries uniform = uniform_weights(window);
  if (window.length_samples <= lp_order + 1) return uniform;

  Eigen::VectorXd residual;
  try {
    PredictorConfig cfg;
    cfg.order = lp_order;
    cfg.poly_order = 0;
    cfg.norm = Norm::l2;
    residual = fit(window, uniform, cfg).residual;
  } catch (const Error&) {
    return uniform;  // degenerate window
  }

  // Short-time energy of the residual, then invert and rescale to [0, 1].
  const SteParams ste;
  const int64_t n_samples = window.length_samples;
  std::vector<double> energy(static_cast<size_t>(n_samples), 0.0);
  for (int64_t n = 0; n < n_samples; ++n) {
    double acc = 0.0;
    for (int k = ste.delay + 1; k <= ste.delay + ste.length; ++k) {
      const int64_t m = n - k;
      if (m >= 0) acc += residual(m) * residual(m);
    }
    energy[static_cast<size_t>(n)] = acc;
  }
  const double mean =
      std::accumulate(energy.begin(), energy.end(), 0.0) / static_cast<double>(n_samples);
  double lo = 0.0, hi = 0.0;
  for (double& v : energy) {
    v = -(v - mean);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi - lo > 0.0)) return uniform;
  WeightSeries out;
  out.weights.resize(energy.size());
  for (size_t i = 0; i < energy.size(); ++i)
    out.weights[i] = std::max((energy[i] - lo) / (hi - lo), dw);
  return out;
}

WeightSeries qcp_weights(const AnalysisWindow& window, const GciSequence& gcis,
                         QcpParams q) {
  if (!(q.position_quotient >= 0.0 && q.position_quotient < 1.0))
    throw Error("qcp_weights: PQ must lie in [0, 1)");
  if (!(q.duration_quotient > 0.0 && q.duration_quotient <= 1.0))
    throw Error("qcp_weights: DQ must lie in (0, 1]");
  if (!(q.floor > 0.0)) throw Error("qcp_weights: floor dw must be positive");

  std::vector<double> w(static_cast<size_t>(window.length_samples), 1.0);
  const int fs = window.source ? window.source->sample_rate_hz : 0;
  for (size_t i = 0; i + 1 < gcis.instants.size(); ++i) {
    const int64_t gci = gcis.instants[i];
    const int64_t t0 = gcis.instants[i + 1] - gci;
    if (t0 <= 0) continue;
    if (fs > 0) {
      const double f0 = static_cast<double>(fs) / static_cast<double>(t0);
      if (f0 < kMinVoicedF0Hz || f0 > kMaxVoicedF0Hz) continue;  // unvoiced cycle
    }
    if (gci + t0 <= window.start_sample) continue;
    if (gci >= window.start_sample + window.length_samples) break;
    fill_cycle(&w, window, gci, t0, q);
  }
  return WeightSeries{std::move(w)};
}

GciSequence estimate_gci(const Waveform& w) {
  const int64_t n = w.size();
  const int fs = w.sample_rate_hz;
  GciSequence out;
  if (n < fs / 20 || fs <= 0) return out;
  double peak = 0.0;
  for (double v : w.samples) peak = std::max(peak, std::abs(v));
  if (peak < 1e-8) return out;  // silence

  const auto [t0_avg, periodicity] = dominant_period(w.samples, fs);
  if (t0_avg <= 0 || periodicity < 0.35) return out;  // aperiodic input

  // Difference, then two near-DC resonators. The slight pole pull-in keeps
  // the double integration bounded over long utterances.
  std::vector<double> y(static_cast<size_t>(n), 0.0);
  for (int64_t i = n - 1; i > 0; --i) y[i] = w.samples[i] - w.samples[i - 1];
  y[0] = 0.0;
  const double r = 0.995;
  for (int pass = 0; pass < 2; ++pass) {
    double y1 = 0.0, y2 = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      const double v = y[i] + 2.0 * r * y1 - r * r * y2;
      y2 = y1;
      y1 = v;
      y[i] = v;
    }
  }

  // Trend removal over 1.5 pitch periods, applied twice.
  const int64_t half = std::max<int64_t>(1, std::llround(0.75 * static_cast<double>(t0_avg)));
  for (int pass = 0; pass < 2; ++pass) {
    const std::vector<double> trend = moving_mean(y, half);
    for (int64_t i = 0; i < n; ++i) y[i] -= trend[i];
  }

  // Candidate epochs: zero crossings of either polarity; the set whose
  // following 1.5 ms carries more signal energy wins (closure precedes the
  // high-energy part of the cycle).
  const int64_t guard = 2 * half;  // edge region distorted by mean removal
  std::vector<int64_t> rising, falling;
  for (int64_t i = std::max<int64_t>(guard, 1); i < n - guard; ++i) {
    if (y[i - 1] < 0.0 && y[i] >= 0.0) rising.push_back(i);
    if (y[i - 1] > 0.0 && y[i] <= 0.0) falling.push_back(i);
  }
  const int64_t burst = std::max<int64_t>(2, std::llround(0.0015 * fs));
  auto polarity_score = [&](const std::vector<int64_t>& c) {
    double score = 0.0;
    for (int64_t idx : c) {
      for (int64_t k = 1; k <= burst; ++k) {
        if (idx + k < n) score += w.samples[idx + k] * w.samples[idx + k];
        if (idx - k >= 0) score -= w.samples[idx - k] * w.samples[idx - k];
      }
    }
    return c.empty() ? -1e300 : score / static_cast<double>(c.size());
  };
  std::vector<int64_t>& crossings =
      polarity_score(rising) >= polarity_score(falling) ? rising : falling;

  for (int64_t idx : crossings) {
    if (out.instants.empty() || idx > out.instants.back()) out.instants.push_back(idx);
  }
  return out;
}

}  // namespace ftrack
