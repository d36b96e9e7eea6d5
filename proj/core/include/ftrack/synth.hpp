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

#ifndef FTRACK_SYNTH_HPP
#define FTRACK_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ftrack/tracker.hpp"
#include "ftrack/waveform.hpp"

namespace ftrack {

/// Liljencrants-Fant glottal flow derivative shape, all timing values as
/// fractions of the cycle length T0. The flow derivative reaches its minimum
/// -ee at te; the return phase decays with time constant derived from ta and
/// closes at tc.
struct LfParams {
  double tp = 0.4167;
  double te = 0.5417;
  double ta = 0.010;
  double tc = 1.0;
  double ee = 1.0;
};

/// Named glottal configuration. The numeric values are calibration data
/// adapted from published voice-quality measurements and ship as editable
/// configuration (see share/phonation_presets.cfg); they are deliberately not
/// treated as ground truth anywhere.
struct PhonationPreset {
  std::string name;
  LfParams lf;
  double aspiration_db = -60.0;  // white-noise level relative to ee
};

/// Built-in table: modal, breathy, creaky, whispery. Throws on unknown names.
PhonationPreset phonation_preset(const std::string& name);
std::vector<std::string> phonation_preset_names();

/// Replaces the built-in values with entries from a key=value config file
/// (entries: <name>.tp/.te/.ta/.tc/.aspiration_db).
void load_phonation_presets(const std::string& path);

/// One synthesis cycle plus the sample offset of its epoch (the te minimum).
struct LfCycle {
  std::vector<double> samples;
  int64_t epoch_offset = 0;
};

/// Samples one LF cycle of t0_samples points. The energy balance (zero net
/// area of the emitted samples) is solved numerically, so the discrete sum is
/// zero to within 1e-6 * ee * T0. Throws when the return phase cannot close
/// (degenerate ta).
LfCycle lf_pulse(const LfParams& p, int64_t t0_samples);

struct ExcitationResult {
  Waveform audio;
  std::vector<int64_t> epochs;  // exact GCI sample indices (te per cycle)
};

/// Concatenated LF cycles following the F0 contour (one value per frame of
/// hop_s seconds, values clamped at the contour ends), plus the preset's
/// aspiration noise. Deterministic for a fixed seed.
ExcitationResult lf_excitation(const std::vector<double>& f0_hz, double hop_s,
                               const PhonationPreset& preset, int sample_rate_hz,
                               double duration_s, uint64_t seed);

/// Pointwise multiplication of an F0 contour; timing is untouched.
std::vector<double> scale_f0(const std::vector<double>& f0_hz, double factor);

/// Per-formant frequency/bandwidth paths sampled on the same frame grid as
/// the F0 contour; single-element paths mean a constant formant.
struct FormantPath {
  std::vector<double> freq_hz;
  std::vector<double> bw_hz;
};

struct VowelSpec {
  std::vector<FormantPath> formants;  // ascending, at most 4
  std::vector<double> f0_hz;          // one value per frame
  double frame_hop_s = 0.010;
  double duration_s = 0.0;
  int sample_rate_hz = 8000;
};

struct SynthesisResult {
  Waveform audio;                    // peak-normalized to 0.5
  FormantTrack ground_truth;         // the requested paths, read at frame centers
  std::vector<double> gci_times_s;   // exact epoch times
};

/// All-pole synthesis: LF excitation filtered through a cascade of resonator
/// sections, one per formant pair (angle 2 pi F / fs, radius exp(-pi B / fs)),
/// with per-sample linear interpolation of the formant paths.
SynthesisResult synthesize_vowel(const VowelSpec& spec,
                                 const PhonationPreset& preset, uint64_t seed);

/// Desk-scale corpus recipe: utterance `index` cycles through eight steady
/// vowel targets (four formant pairs each), with seeded per-utterance target
/// jitter, gentle formant glides and an F0 declination around mean_f0.
/// Deterministic in (index, seed).
VowelSpec corpus_vowel_spec(int index, double mean_f0, double duration_s,
                            int sample_rate_hz, uint64_t seed);

/// y = A(z) x (FIR inverse filter), zero initial history.
std::vector<double> fir_filter(const std::vector<double>& x,
                               const Eigen::VectorXd& lpc);
/// y = x / A(z) (all-pole filter), zero initial state. Exact inverse of
/// fir_filter for the same coefficients.
std::vector<double> all_pole_filter(const std::vector<double>& x,
                                    const Eigen::VectorXd& lpc);

/// Replaces the spectral envelope of an utterance with reference formants:
/// order-18 stationary L2 inverse filtering (20 ms frames, 10 ms hop) yields
/// a spectrally flat residual that then drives per-frame all-pole filters
/// built from the reference track, overlap-added with Hann windows. Throws
/// when the reference does not cover the utterance at its hop.
Waveform resynthesize_from_reference(const Waveform& w, const FormantTrack& ref);

/// Seeded Gaussian white noise at unit variance.
Waveform white_noise(int64_t length, int sample_rate_hz, uint64_t seed);

/// clean + g * noise with g chosen so the full-utterance powers satisfy
/// 10 log10(P_clean / P_noise) = snr_db. Noise shorter than the signal is
/// tiled; a differing noise sample rate is resampled first.
Waveform mix_noise_at_snr(const Waveform& clean, const Waveform& noise,
                          double snr_db);

}  // namespace ftrack

#endif  // FTRACK_SYNTH_HPP
