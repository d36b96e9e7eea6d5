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

#include "ftrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "ftrack/predictor.hpp"

namespace ftrack {
namespace {

std::map<std::string, PhonationPreset>& preset_table() {
  // Shapes adapted from published voice-quality parameterizations; the
  // authoritative copy lives in share/phonation_presets.cfg.
  static std::map<std::string, PhonationPreset> table = {
      {"modal", {"modal", {0.4167, 0.5417, 0.010, 1.0, 1.0}, -60.0}},
      {"breathy", {"breathy", {0.5000, 0.7000, 0.050, 1.0, 1.0}, -25.0}},
      {"creaky", {"creaky", {0.3125, 0.3750, 0.003, 1.0, 1.0}, -60.0}},
      {"whispery", {"whispery", {0.5000, 0.7250, 0.080, 1.0, 1.0}, -15.0}},
  };
  return table;
}

double guarded_exp(double x) { return std::exp(std::min(x, 700.0)); }

// Positive root of eps * ta - 1 + exp(-eps * tb) = 0.
double solve_return_epsilon(double ta, double tb) {
  if (!(ta < tb))
    throw Error("lf_pulse: return phase cannot close, ta must be < tc - te");
  double lo = 1e-9 / ta, hi = 2.0 / ta;
  auto f = [&](double e) { return e * ta - 1.0 + guarded_exp(-e * tb); };
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Linear interpolation with knots at frame centers (k + 0.5) * hop, clamped
// beyond the ends, matching how ground-truth frames are emitted.
double path_value(const std::vector<double>& values, double t_s, double hop_s) {
  if (values.empty()) throw Error("synth: empty contour");
  if (values.size() == 1) return values[0];
  const double pos = t_s / hop_s - 0.5;
  if (pos <= 0.0) return values.front();
  const double last = static_cast<double>(values.size() - 1);
  if (pos >= last) return values.back();
  const size_t k = static_cast<size_t>(pos);
  const double frac = pos - static_cast<double>(k);
  return values[k] * (1.0 - frac) + values[k + 1] * frac;
}


void hann_overlap_add(std::vector<double>* acc, std::vector<double>* win_acc,
                      const std::vector<double>& segment, int64_t start) {
  const int64_t len = static_cast<int64_t>(segment.size());
  for (int64_t i = 0; i < len; ++i) {
    const double h =
        0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(len));
    (*acc)[static_cast<size_t>(start + i)] += segment[static_cast<size_t>(i)] * h;
    (*win_acc)[static_cast<size_t>(start + i)] += h;
  }
}

}  // namespace

PhonationPreset phonation_preset(const std::string& name) {
  const auto& table = preset_table();
  const auto it = table.find(name);
  if (it == table.end()) throw Error("unknown phonation preset: " + name);
  return it->second;
}

std::vector<std::string> phonation_preset_names() {
  std::vector<std::string> names;
  for (const auto& [name, preset] : preset_table()) names.push_back(name);
  return names;
}

void load_phonation_presets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open preset file: " + path);
  auto& table = preset_table();
  std::string line;
  while (std::getline(in, line)) {
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq);
    key.erase(std::remove_if(key.begin(), key.end(), ::isspace), key.end());
    const size_t dot = key.find('.');
    if (dot == std::string::npos) continue;
    const std::string name = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    const double value = std::stod(line.substr(eq + 1));
    PhonationPreset& p = table[name];
    if (p.name.empty()) p.name = name;
    if (field == "tp") p.lf.tp = value;
    else if (field == "te") p.lf.te = value;
    else if (field == "ta") p.lf.ta = value;
    else if (field == "tc") p.lf.tc = value;
    else if (field == "ee") p.lf.ee = value;
    else if (field == "aspiration_db") p.aspiration_db = value;
    else throw Error("unknown preset field: " + field);
  }
}

LfCycle lf_pulse(const LfParams& p, int64_t t0_samples) {
  if (!(p.tp > 0.0 && p.tp < p.te && p.te <= p.tc && p.tc <= 1.0 && p.ta > 0.0))
    throw Error("lf_pulse: need 0 < tp < te <= tc <= 1 and ta > 0");
  if (t0_samples < 8) throw Error("lf_pulse: cycle too short");
  const double t0 = static_cast<double>(t0_samples);
  if (p.ee == 0.0) {
    LfCycle silent;
    silent.samples.assign(static_cast<size_t>(t0_samples), 0.0);
    silent.epoch_offset = std::llround(p.te * t0);
    return silent;
  }

  // Snap te and tc to the sample grid so the epoch sample carries exactly -ee
  // and the two branches agree there.
  int64_t j_e = std::llround(p.te * t0);
  j_e = std::clamp<int64_t>(j_e, static_cast<int64_t>(p.tp * t0) + 1, t0_samples - 1);
  const int64_t j_c = std::clamp<int64_t>(std::llround(p.tc * t0), j_e, t0_samples);
  const double te_d = static_cast<double>(j_e) / t0;
  const double tc_d = static_cast<double>(j_c) / t0;
  const double tb = tc_d - te_d;

  const double omega = M_PI / p.tp;
  const double sin_e = std::sin(omega * te_d);
  if (!(sin_e < 0.0))
    throw Error("lf_pulse: te must fall in the falling half of the open phase");

  LfCycle cycle;
  cycle.samples.assign(static_cast<size_t>(t0_samples), 0.0);
  cycle.epoch_offset = j_e;

  double ret_sum = 0.0;
  if (tb > 0.0) {
    const double eps = solve_return_epsilon(p.ta, tb);
    const double tail = guarded_exp(-eps * tb);
    for (int64_t j = j_e + 1; j < j_c; ++j) {
      const double t = static_cast<double>(j) / t0;
      const double u = -(p.ee / (eps * p.ta)) * (guarded_exp(-eps * (t - te_d)) - tail);
      cycle.samples[static_cast<size_t>(j)] = u;
      ret_sum += u;
    }
  }

  // Energy balance: pick the opening-phase growth rate so the discrete cycle
  // sums to zero. g is positive for very negative alpha and negative for very
  // positive alpha, so a sign-change bracket always exists.
  auto open_sum = [&](double alpha) {
    double s = 0.0;
    for (int64_t j = 1; j <= j_e; ++j) {
      const double t = static_cast<double>(j) / t0;
      s += guarded_exp(alpha * (t - te_d)) * std::sin(omega * t);
    }
    return s;
  };
  auto balance = [&](double alpha) {
    return (-p.ee / sin_e) * open_sum(alpha) + ret_sum;
  };
  double span = 50.0;
  while (!(balance(-span) > 0.0 && balance(span) < 0.0)) {
    span *= 2.0;
    if (span > 1e7) throw Error("lf_pulse: energy balance has no solution");
  }
  double lo = -span, hi = span;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (balance(mid) > 0.0 ? lo : hi) = mid;
    if (std::abs(balance(0.5 * (lo + hi))) < 1e-9 * p.ee * t0) break;
  }
  const double alpha = 0.5 * (lo + hi);

  for (int64_t j = 1; j <= j_e; ++j) {
    const double t = static_cast<double>(j) / t0;
    cycle.samples[static_cast<size_t>(j)] =
        -p.ee * guarded_exp(alpha * (t - te_d)) * std::sin(omega * t) / sin_e;
  }
  return cycle;
}

ExcitationResult lf_excitation(const std::vector<double>& f0_hz, double hop_s,
                               const PhonationPreset& preset, int sample_rate_hz,
                               double duration_s, uint64_t seed) {
  if (f0_hz.empty()) throw Error("lf_excitation: empty F0 contour");
  for (double f : f0_hz)
    if (!(f > 0.0)) throw Error("lf_excitation: F0 must be positive throughout");
  const double fs = static_cast<double>(sample_rate_hz);
  const int64_t n = std::llround(duration_s * fs);

  ExcitationResult out;
  out.audio.sample_rate_hz = sample_rate_hz;
  out.audio.samples.assign(static_cast<size_t>(n), 0.0);

  int64_t t_cur = 0;
  while (true) {
    const size_t frame = std::min(
        f0_hz.size() - 1,
        static_cast<size_t>(std::max(0.0, (static_cast<double>(t_cur) / fs) / hop_s)));
    const int64_t t0 = std::max<int64_t>(8, std::llround(fs / f0_hz[frame]));
    if (t_cur + t0 > n) break;
    const LfCycle cycle = lf_pulse(preset.lf, t0);
    for (int64_t j = 0; j < t0; ++j)
      out.audio.samples[static_cast<size_t>(t_cur + j)] +=
          cycle.samples[static_cast<size_t>(j)];
    out.epochs.push_back(t_cur + cycle.epoch_offset);
    t_cur += t0;
  }

  const double sigma = preset.lf.ee * std::pow(10.0, preset.aspiration_db / 20.0);
  if (sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, sigma);
    for (double& s : out.audio.samples) s += gauss(rng);
  }
  return out;
}

std::vector<double> scale_f0(const std::vector<double>& f0_hz, double factor) {
  std::vector<double> out(f0_hz.size());
  for (size_t i = 0; i < f0_hz.size(); ++i) out[i] = f0_hz[i] * factor;
  return out;
}

SynthesisResult synthesize_vowel(const VowelSpec& spec,
                                 const PhonationPreset& preset, uint64_t seed) {
  if (spec.formants.empty() || spec.formants.size() > 4)
    throw Error("synthesize_vowel: need 1..4 formant paths");
  if (!(spec.duration_s > 0.0) || spec.sample_rate_hz <= 0)
    throw Error("synthesize_vowel: invalid duration or sample rate");
  const double fs = static_cast<double>(spec.sample_rate_hz);
  const size_t n_frames = spec.f0_hz.size();
  for (const FormantPath& path : spec.formants) {
    if (path.freq_hz.size() != path.bw_hz.size())
      throw Error("synthesize_vowel: formant path length mismatch");
    for (double f : path.freq_hz)
      if (!(f > 0.0 && f < 0.5 * fs))
        throw Error("synthesize_vowel: formant frequency above Nyquist");
    for (double b : path.bw_hz)
      if (!(b > 0.0)) throw Error("synthesize_vowel: bandwidth must be positive");
  }

  ExcitationResult exc = lf_excitation(spec.f0_hz, spec.frame_hop_s, preset,
                                       spec.sample_rate_hz, spec.duration_s, seed);
  const int64_t n = exc.audio.size();
  const size_t n_sections = spec.formants.size();

  SynthesisResult out;
  out.audio.sample_rate_hz = spec.sample_rate_hz;
  out.audio.samples.assign(static_cast<size_t>(n), 0.0);

  std::vector<double> y1(n_sections, 0.0), y2(n_sections, 0.0);
  for (int64_t i = 0; i < n; ++i) {
    const double t_s = static_cast<double>(i) / fs;
    double v = exc.audio.samples[static_cast<size_t>(i)];
    for (size_t s = 0; s < n_sections; ++s) {
      const double freq = path_value(spec.formants[s].freq_hz, t_s, spec.frame_hop_s);
      const double bw = path_value(spec.formants[s].bw_hz, t_s, spec.frame_hop_s);
      const double r = std::exp(-M_PI * bw / fs);
      const double c = 2.0 * r * std::cos(2.0 * M_PI * freq / fs);
      const double w = v + c * y1[s] - r * r * y2[s];
      y2[s] = y1[s];
      y1[s] = w;
      v = w;
    }
    out.audio.samples[static_cast<size_t>(i)] = v;
  }

  double peak = 0.0;
  for (double s : out.audio.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0)
    for (double& s : out.audio.samples) s *= 0.5 / peak;

  out.ground_truth.sample_rate_hz = spec.sample_rate_hz;
  out.ground_truth.config.shift_ms = spec.frame_hop_s * 1000.0;
  for (size_t k = 0; k < n_frames; ++k) {
    const double t_s = (static_cast<double>(k) + 0.5) * spec.frame_hop_s;
    if (t_s >= spec.duration_s) break;
    FormantFrame frame;
    frame.time_s = t_s;
    for (const FormantPath& path : spec.formants) {
      const size_t idx = std::min(k, path.freq_hz.size() - 1);
      frame.formants.emplace_back(FormantEstimate{path.freq_hz[idx], path.bw_hz[idx]});
    }
    out.ground_truth.frames.push_back(std::move(frame));
  }

  out.gci_times_s.reserve(exc.epochs.size());
  for (int64_t e : exc.epochs)
    out.gci_times_s.push_back(static_cast<double>(e) / fs);
  return out;
}

namespace {

struct VowelTarget {
  double f[4];
  double b[4];
};
// Steady targets in the classic American English vowel space.
constexpr VowelTarget kVowelTable[] = {
    {{730, 1090, 2440, 3400}, {60, 80, 120, 175}},   // aa
    {{270, 2290, 3010, 3600}, {55, 70, 110, 170}},   // iy
    {{300, 870, 2240, 3200}, {55, 75, 115, 170}},    // uw
    {{530, 1840, 2480, 3500}, {60, 80, 120, 175}},   // eh
    {{570, 840, 2410, 3300}, {60, 80, 120, 175}},    // ao
    {{660, 1720, 2410, 3450}, {65, 85, 125, 180}},   // ae
    {{390, 1990, 2550, 3550}, {55, 75, 115, 170}},   // ih
    {{640, 1190, 2390, 3350}, {60, 80, 120, 175}},   // ah
};

}  // namespace

VowelSpec corpus_vowel_spec(int index, double mean_f0, double duration_s,
                            int sample_rate_hz, uint64_t seed) {
  const VowelTarget& vowel = kVowelTable[static_cast<size_t>(index) % 8];
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  std::uniform_real_distribution<double> glide(-0.08, 0.08);

  VowelSpec spec;
  spec.sample_rate_hz = sample_rate_hz;
  spec.duration_s = duration_s;
  spec.frame_hop_s = 0.010;
  const int n_frames =
      std::max(1, static_cast<int>(std::lround(duration_s / spec.frame_hop_s)));

  for (int i = 0; i < 4; ++i) {
    const double base = vowel.f[i] * (1.0 + jitter(rng));
    const double slope = glide(rng);  // gentle ramp keeps the tract time-varying
    FormantPath path;
    for (int k = 0; k < n_frames; ++k) {
      const double u = n_frames > 1 ? static_cast<double>(k) / (n_frames - 1) : 0.0;
      path.freq_hz.push_back(base * (1.0 + slope * (u - 0.5)));
      path.bw_hz.push_back(vowel.b[i]);
    }
    spec.formants.push_back(std::move(path));
  }
  for (int k = 0; k < n_frames; ++k) {
    const double u = n_frames > 1 ? static_cast<double>(k) / (n_frames - 1) : 0.0;
    spec.f0_hz.push_back(mean_f0 * (1.06 - 0.12 * u));  // natural declination
  }
  return spec;
}

std::vector<double> fir_filter(const std::vector<double>& x,
                               const Eigen::VectorXd& lpc) {
  std::vector<double> y(x.size(), 0.0);
  for (size_t n = 0; n < x.size(); ++n) {
    double acc = 0.0;
    for (int k = 0; k < lpc.size(); ++k)
      if (n >= static_cast<size_t>(k)) acc += lpc(k) * x[n - static_cast<size_t>(k)];
    y[n] = acc;
  }
  return y;
}

std::vector<double> all_pole_filter(const std::vector<double>& x,
                                    const Eigen::VectorXd& lpc) {
  std::vector<double> y(x.size(), 0.0);
  for (size_t n = 0; n < x.size(); ++n) {
    double acc = x[n];
    for (int k = 1; k < lpc.size(); ++k)
      if (n >= static_cast<size_t>(k)) acc -= lpc(k) * y[n - static_cast<size_t>(k)];
    y[n] = acc / lpc(0);
  }
  return y;
}

Waveform resynthesize_from_reference(const Waveform& w, const FormantTrack& ref) {
  validate(w);
  if (ref.frames.empty()) throw Error("resynthesize: empty reference track");
  const double fs = static_cast<double>(w.sample_rate_hz);
  const int64_t n = w.size();
  const int64_t frame_len = std::llround(0.020 * fs);
  const int64_t hop = std::llround(0.010 * fs);
  const int order = 18;
  if (n < frame_len) throw Error("resynthesize: utterance shorter than one frame");

  const double last_time = ref.frames.back().time_s;
  if (last_time + 2.0 * 0.010 < w.duration_s() - 0.010)
    throw Error("resynthesize: reference track does not cover the utterance");

  // Stage 1: spectrally flat residual via short-time high-order inverse
  // filtering, Hann overlap-add.
  std::vector<double> res_acc(static_cast<size_t>(n), 0.0);
  std::vector<double> win_acc(static_cast<size_t>(n), 0.0);
  PredictorConfig lp_cfg{order, 0, Norm::l2, WeightingKind::none};
  for (int64_t start = 0; start < n; start += hop) {
    const int64_t len = std::min(frame_len, n - start);
    if (len <= order * 2) break;
    const AnalysisWindow window{&w, start, len};
    const FitResult fitted = fit(window, uniform_weights(window), lp_cfg);
    std::vector<double> e(static_cast<size_t>(len));
    for (int64_t i = 0; i < len; ++i) e[static_cast<size_t>(i)] = fitted.residual(i);
    hann_overlap_add(&res_acc, &win_acc, e, start);
  }
  std::vector<double> residual(static_cast<size_t>(n), 0.0);
  for (int64_t i = 0; i < n; ++i)
    if (win_acc[static_cast<size_t>(i)] > 1e-9)
      residual[static_cast<size_t>(i)] =
          res_acc[static_cast<size_t>(i)] / win_acc[static_cast<size_t>(i)];

  // Stage 2: the residual drives resonator sections pinned to the reference
  // formants, with per-sample interpolation between frames and continuous
  // filter state (a fresh zero state per frame would smear low formants whose
  // ring time is comparable to the hop).
  size_t n_slots = 0;
  for (const FormantFrame& frame : ref.frames)
    n_slots = std::max(n_slots, frame.formants.size());
  if (n_slots == 0) throw Error("resynthesize: reference frames carry no formants");

  // Per-slot contours sampled at the reference frame times, holes filled by
  // holding the nearest present value.
  const size_t n_frames = ref.frames.size();
  std::vector<std::vector<double>> freq(n_slots), bw(n_slots);
  for (size_t s = 0; s < n_slots; ++s) {
    freq[s].resize(n_frames);
    bw[s].resize(n_frames);
    double last_f = 0.0, last_b = 0.0;
    bool seen = false;
    for (size_t k = 0; k < n_frames; ++k) {
      const auto& slots = ref.frames[k].formants;
      if (s < slots.size() && slots[s]) {
        last_f = slots[s]->frequency_hz;
        last_b = slots[s]->bandwidth_hz;
        if (!seen)
          for (size_t back = 0; back < k; ++back) {
            freq[s][back] = last_f;
            bw[s][back] = last_b;
          }
        seen = true;
      }
      freq[s][k] = last_f;
      bw[s][k] = last_b;
    }
    if (!seen) {
      freq[s].assign(n_frames, 0.0);  // an always-empty slot passes through
      bw[s].assign(n_frames, 0.0);
    }
  }

  const double t0 = ref.frames.front().time_s;
  const double hop_s = n_frames > 1
                           ? (ref.frames.back().time_s - t0) / static_cast<double>(n_frames - 1)
                           : 0.010;
  auto contour_at = [&](const std::vector<double>& values, double t_s) {
    const double pos = (t_s - t0) / hop_s;
    if (pos <= 0.0) return values.front();
    if (pos >= static_cast<double>(n_frames - 1)) return values.back();
    const size_t k = static_cast<size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    return values[k] * (1.0 - frac) + values[k + 1] * frac;
  };

  Waveform out;
  out.sample_rate_hz = w.sample_rate_hz;
  out.samples.assign(static_cast<size_t>(n), 0.0);
  std::vector<double> y1(n_slots, 0.0), y2(n_slots, 0.0);
  double peak = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    const double t_s = static_cast<double>(i) / fs;
    double v = residual[static_cast<size_t>(i)];
    for (size_t s = 0; s < n_slots; ++s) {
      const double f = contour_at(freq[s], t_s);
      if (!(f > 0.0)) continue;
      const double r = std::exp(-M_PI * std::max(contour_at(bw[s], t_s), 1.0) / fs);
      const double c = 2.0 * r * std::cos(2.0 * M_PI * f / fs);
      const double next = v + c * y1[s] - r * r * y2[s];
      y2[s] = y1[s];
      y1[s] = next;
      v = next;
    }
    out.samples[static_cast<size_t>(i)] = v;
    peak = std::max(peak, std::abs(v));
  }
  if (peak > 0.0)
    for (double& s : out.samples) s *= 0.5 / peak;  // headroom for WAV export
  return out;
}

Waveform white_noise(int64_t length, int sample_rate_hz, uint64_t seed) {
  Waveform out;
  out.sample_rate_hz = sample_rate_hz;
  out.samples.resize(static_cast<size_t>(length));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& s : out.samples) s = gauss(rng);
  return out;
}

Waveform mix_noise_at_snr(const Waveform& clean, const Waveform& noise,
                          double snr_db) {
  validate(clean);
  const Waveform matched = noise.sample_rate_hz == clean.sample_rate_hz
                               ? noise
                               : resample(noise, clean.sample_rate_hz);
  if (matched.samples.empty()) throw Error("mix_noise: empty noise source");

  const int64_t n = clean.size();
  double p_clean = 0.0;
  for (double s : clean.samples) p_clean += s * s;
  if (!(p_clean > 0.0)) throw Error("mix_noise: clean signal has zero power");

  // Tile the noise when it is shorter than the signal.
  std::vector<double> seg(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    seg[static_cast<size_t>(i)] =
        matched.samples[static_cast<size_t>(i) % matched.samples.size()];
  double p_noise = 0.0;
  for (double s : seg) p_noise += s * s;
  if (!(p_noise > 0.0)) throw Error("mix_noise: noise has zero power");

  const double gain = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));
  Waveform out;
  out.sample_rate_hz = clean.sample_rate_hz;
  out.samples.resize(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    out.samples[static_cast<size_t>(i)] =
        clean.samples[static_cast<size_t>(i)] + gain * seg[static_cast<size_t>(i)];
  return out;
}

}  // namespace ftrack
