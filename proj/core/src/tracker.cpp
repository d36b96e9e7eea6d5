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

#include "ftrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iostream>

namespace ftrack {
namespace {

constexpr double kEdgeMarginHz = 50.0;
constexpr double kMergeToleranceHz = 50.0;
constexpr double kRootBandwidthCapHz = 700.0;

struct PoleCandidate {
  double frequency_hz;
  double bandwidth_hz;
};

// Complex roots of A(z) (coefficients [1, a_1..a_p]) via the companion
// matrix, mapped to (frequency, bandwidth) pairs for positive frequencies.
std::vector<PoleCandidate> pole_candidates(const Eigen::VectorXd& lpc, double fs) {
  std::vector<PoleCandidate> out;
  int degree = static_cast<int>(lpc.size()) - 1;
  while (degree > 0 && lpc(degree) == 0.0) --degree;
  if (degree < 1) return out;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 0; i < degree; ++i) companion(0, i) = -lpc(i + 1) / lpc(0);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) return out;

  for (int i = 0; i < degree; ++i) {
    const std::complex<double> z = es.eigenvalues()(i);
    if (z.imag() <= 0.0) continue;  // keep one of each conjugate pair
    const double radius = std::abs(z);
    if (radius <= 0.0) continue;
    const double freq = std::arg(z) * fs / (2.0 * M_PI);
    const double bw = -(fs / M_PI) * std::log(radius);
    out.push_back({freq, bw});
  }
  std::sort(out.begin(), out.end(), [](const PoleCandidate& a, const PoleCandidate& b) {
    return a.frequency_hz < b.frequency_hz;
  });
  return out;
}

double half_power_bandwidth(const std::vector<double>& spectrum, int peak_bin,
                            double bin_hz) {
  const double half = spectrum[static_cast<size_t>(peak_bin)] * 0.5;
  const int n = static_cast<int>(spectrum.size());
  double left = 0.0, right = 0.0;
  for (int i = peak_bin; i >= 0; --i) {
    if (spectrum[static_cast<size_t>(i)] <= half) {
      left = static_cast<double>(peak_bin - i);
      break;
    }
    if (i == 0) left = static_cast<double>(peak_bin);
  }
  for (int i = peak_bin; i < n; ++i) {
    if (spectrum[static_cast<size_t>(i)] <= half) {
      right = static_cast<double>(i - peak_bin);
      break;
    }
    if (i == n - 1) right = static_cast<double>(n - 1 - peak_bin);
  }
  const double width = (left + right) * bin_hz;
  return std::clamp(width, 10.0, 2000.0);
}

}  // namespace

std::vector<double> spectrum_at(const TvModel& model, int64_t n, int grid_size,
                                double /*sample_rate_hz: fixes the axis only*/) {
  if (grid_size < 2) throw Error("spectrum_at: grid must have at least 2 points");
  const Eigen::VectorXd a = model.lpc_at(n);
  std::vector<double> power(static_cast<size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double omega = M_PI * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    // A(e^{jw}) by Horner in z^-1 = e^{-jw}.
    const std::complex<double> zinv = std::polar(1.0, -omega);
    std::complex<double> acc(0.0, 0.0);
    for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) acc = acc * zinv + a(k);
    const double mag2 = std::norm(acc);
    power[static_cast<size_t>(i)] = mag2 > 0.0 ? 1.0 / mag2 : 1e300;
  }
  return power;
}

std::vector<FormantEstimate> pick_formants(const std::vector<double>& spectrum,
                                           double sample_rate_hz,
                                           int max_formants,
                                           const Eigen::VectorXd& lpc) {
  std::vector<FormantEstimate> picked;
  const int n = static_cast<int>(spectrum.size());
  if (n < 3 || max_formants < 1) return picked;
  const double bin_hz = 0.5 * sample_rate_hz / static_cast<double>(n - 1);
  const double lo_hz = kEdgeMarginHz;
  const double hi_hz = 0.5 * sample_rate_hz - kEdgeMarginHz;

  const std::vector<PoleCandidate> poles = pole_candidates(lpc, sample_rate_hz);
  auto nearest_pole = [&](double freq) -> const PoleCandidate* {
    const PoleCandidate* best = nullptr;
    double best_dist = 300.0;  // only adopt a root that plausibly made this peak
    for (const PoleCandidate& p : poles) {
      const double dist = std::abs(p.frequency_hz - freq);
      if (dist < best_dist) {
        best_dist = dist;
        best = &p;
      }
    }
    return best;
  };

  for (int i = 1; i + 1 < n; ++i) {
    if (!(spectrum[i] > spectrum[i - 1] && spectrum[i] >= spectrum[i + 1])) continue;
    const double p1 = std::log(spectrum[i - 1]);
    const double p2 = std::log(spectrum[i]);
    const double p3 = std::log(spectrum[i + 1]);
    const double denom = p1 - 2.0 * p2 + p3;
    const double delta = denom < 0.0 ? std::clamp(0.5 * (p1 - p3) / denom, -0.5, 0.5) : 0.0;
    const double freq = (static_cast<double>(i) + delta) * bin_hz;
    if (freq <= lo_hz || freq >= hi_hz) continue;
    const PoleCandidate* pole = nearest_pole(freq);
    const double bw = pole ? std::max(std::abs(pole->bandwidth_hz), 1.0)
                           : half_power_bandwidth(spectrum, i, bin_hz);
    picked.push_back({freq, bw});
  }

  if (static_cast<int>(picked.size()) < max_formants) {
    for (const PoleCandidate& p : poles) {
      if (p.frequency_hz <= lo_hz || p.frequency_hz >= hi_hz) continue;
      if (!(p.bandwidth_hz > 0.0 && p.bandwidth_hz < kRootBandwidthCapHz)) continue;
      bool duplicate = false;
      for (const FormantEstimate& f : picked)
        duplicate |= std::abs(f.frequency_hz - p.frequency_hz) < kMergeToleranceHz;
      if (!duplicate) picked.push_back({p.frequency_hz, p.bandwidth_hz});
    }
  }

  std::sort(picked.begin(), picked.end(),
            [](const FormantEstimate& a, const FormantEstimate& b) {
              return a.frequency_hz < b.frequency_hz;
            });
  if (static_cast<int>(picked.size()) > max_formants) picked.resize(max_formants);
  return picked;
}

FormantTrack track_formants(const Waveform& w, const TrackerConfig& cfg,
                            const GciSequence* gcis) {
  validate(w);
  FormantTrack track;
  track.sample_rate_hz = w.sample_rate_hz;
  track.config = cfg;

  GciSequence estimated;
  const GciSequence* gci_ptr = gcis;
  if (cfg.predictor.weighting == WeightingKind::qcp && gci_ptr == nullptr) {
    estimated = estimate_gci(w);
    gci_ptr = &estimated;
  }

  const double fs = static_cast<double>(w.sample_rate_hz);
  const std::vector<WindowFrames> windows = frame_windows(w, cfg.window_ms, cfg.shift_ms);
  int window_id = 0;
  for (const WindowFrames& wf : windows) {
    std::optional<FitResult> fitted;
    try {
      WeightSeries weights;
      switch (cfg.predictor.weighting) {
        case WeightingKind::none: weights = uniform_weights(wf.window); break;
        case WeightingKind::ste: weights = ste_weights(wf.window, cfg.ste); break;
        case WeightingKind::residual:
          weights = residual_weights(wf.window, cfg.predictor.order);
          break;
        case WeightingKind::qcp: weights = qcp_weights(wf.window, *gci_ptr, cfg.qcp); break;
      }
      fitted = fit(wf.window, weights, cfg.predictor);
    } catch (const Error& err) {
      std::cerr << "ftrack: window " << window_id << " fit failed: " << err.what()
                << "\n";
    }

    for (int64_t instant : wf.frame_instants) {
      FormantFrame frame;
      frame.time_s = static_cast<double>(wf.window.start_sample + instant) / fs;
      frame.window_id = window_id;
      if (fitted) {
        const Eigen::VectorXd lpc = fitted->model.lpc_at(instant);
        const std::vector<double> power =
            spectrum_at(fitted->model, instant, cfg.grid_size, fs);
        for (const FormantEstimate& f :
             pick_formants(power, fs, cfg.max_formants, lpc))
          frame.formants.emplace_back(f);
      }
      track.frames.push_back(std::move(frame));
    }
    ++window_id;
  }
  return track;
}

}  // namespace ftrack
