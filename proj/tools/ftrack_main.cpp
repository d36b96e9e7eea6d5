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
//
// Command-line front-end: track / synth / eval / noise subcommands.
// Exit codes: 0 success, 2 usage error, 1 runtime error.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "ftrack/io.hpp"
#include "ftrack/metrics.hpp"
#include "ftrack/synth.hpp"
#include "ftrack/tracker.hpp"
#include "ftrack/waveform.hpp"

namespace {

using namespace ftrack;

struct TrackArgs {
  std::string input, output, gci_path, method = "tvqcp-l1", weighting = "auto";
  int order = 8;
  int poly = 3;
  double window_ms = 100.0, shift_ms = 10.0;
  int fs = 8000;
  double preemph = 0.97;
  double dq = 0.8, pq = 0.05, dw = 1e-5;
  int nramp = 3;
  int ste_delay = 0, ste_length = 12;
  int max_formants = 4;
};

// method name -> (poly override?, norm, default weighting)
void apply_method(const std::string& method, TrackerConfig* cfg, bool poly_set) {
  const size_t dash = method.rfind('-');
  if (dash == std::string::npos)
    throw CLI::ValidationError("--method", "expected <family>-<norm>, e.g. tvqcp-l1");
  const std::string family = method.substr(0, dash);
  const std::string norm = method.substr(dash + 1);
  if (norm == "l1") cfg->predictor.norm = Norm::l1;
  else if (norm == "l2") cfg->predictor.norm = Norm::l2;
  else throw CLI::ValidationError("--method", "norm must be l1 or l2");

  if (family == "lp") {
    cfg->predictor.weighting = WeightingKind::none;
    if (!poly_set) cfg->predictor.poly_order = 0;
  } else if (family == "wlp") {
    cfg->predictor.weighting = WeightingKind::ste;
    if (!poly_set) cfg->predictor.poly_order = 0;
  } else if (family == "tvlp") {
    cfg->predictor.weighting = WeightingKind::none;
  } else if (family == "tvqcp") {
    cfg->predictor.weighting = WeightingKind::qcp;
  } else {
    throw CLI::ValidationError("--method", "family must be lp, wlp, tvlp or tvqcp");
  }
}

WeightingKind parse_weighting(const std::string& name) {
  if (name == "none") return WeightingKind::none;
  if (name == "ste") return WeightingKind::ste;
  if (name == "residual") return WeightingKind::residual;
  if (name == "qcp") return WeightingKind::qcp;
  throw CLI::ValidationError("--weighting", "must be none, ste, residual or qcp");
}

int run_track(const TrackArgs& args, bool poly_set, bool weighting_set) {
  TrackerConfig cfg;
  cfg.predictor.order = args.order;
  cfg.predictor.poly_order = args.poly;
  apply_method(args.method, &cfg, poly_set);
  if (poly_set) cfg.predictor.poly_order = args.poly;
  if (weighting_set) cfg.predictor.weighting = parse_weighting(args.weighting);
  cfg.window_ms = args.window_ms;
  cfg.shift_ms = args.shift_ms;
  cfg.max_formants = args.max_formants;
  cfg.qcp = QcpParams{args.pq, args.dq, args.nramp, args.dw};
  cfg.ste = SteParams{args.ste_delay, args.ste_length};

  Waveform w = load_waveform(args.input);
  w = resample(w, args.fs);

  std::optional<GciSequence> gcis;
  if (!args.gci_path.empty()) {
    gcis = read_gci_file(args.gci_path, args.fs);
    if (!gcis->instants.empty() && gcis->instants.back() >= w.size())
      throw Error(args.gci_path + ": GCI time beyond the end of the audio");
  } else if (cfg.predictor.weighting == WeightingKind::qcp) {
    gcis = estimate_gci(w);  // detect before pre-emphasis
  }

  w = preemphasize(w, PreemphasisCoeff{args.preemph});
  const FormantTrack track = track_formants(w, cfg, gcis ? &*gcis : nullptr);
  write_track_csv(args.output, track);
  std::cout << "wrote " << track.frames.size() << " frames to " << args.output << "\n";
  return 0;
}

struct SynthArgs {
  std::string out_dir;
  std::vector<std::string> phonations = {"modal", "breathy", "creaky", "whispery"};
  std::vector<double> f0_factors = {1.0};
  int utterances = 8;
  double f0 = 120.0;
  double duration = 0.8;
  int fs = 8000;
  uint64_t seed = 1;
  std::string presets_path;
};

int run_synth(const SynthArgs& args) {
  if (!args.presets_path.empty()) load_phonation_presets(args.presets_path);
  std::filesystem::create_directories(args.out_dir);
  std::ostringstream manifest;
  manifest << "# utterance phonation f0_factor wav track gci\n";
  int emitted = 0;

  for (int u = 0; u < args.utterances; ++u) {
    for (const std::string& phonation : args.phonations) {
      const PhonationPreset preset = phonation_preset(phonation);
      for (double factor : args.f0_factors) {
        // One deterministic stream per corpus cell.
        const uint64_t cell_seed =
            args.seed * 1000003ULL + static_cast<uint64_t>(u) * 97ULL +
            std::hash<std::string>{}(phonation) % 89ULL +
            static_cast<uint64_t>(std::lround(factor * 4.0));
        VowelSpec spec =
            corpus_vowel_spec(u, args.f0, args.duration, args.fs, cell_seed);
        spec.f0_hz = scale_f0(spec.f0_hz, factor);
        const SynthesisResult result = synthesize_vowel(spec, preset, cell_seed);

        std::ostringstream stem;
        stem << "utt" << std::setw(3) << std::setfill('0') << u << "_" << phonation
             << "_f" << std::fixed << std::setprecision(1) << factor;
        const std::string base = args.out_dir + "/" + stem.str();
        save_waveform(base + ".wav", result.audio);
        write_track_csv(base + ".csv", result.ground_truth);
        write_gci_file(base + ".gci", result.gci_times_s);
        manifest << u << " " << phonation << " " << factor << " " << stem.str()
                 << ".wav " << stem.str() << ".csv " << stem.str() << ".gci\n";
        ++emitted;
      }
    }
  }

  std::ofstream mf(args.out_dir + "/manifest.txt");
  mf << manifest.str();
  std::cout << "wrote " << emitted << " utterances to " << args.out_dir << "\n";
  return 0;
}

struct EvalArgs {
  std::string hyp, ref, labels, out_csv;
  std::vector<std::string> categories;
  double tau_r = 0.15, tau_a = 300.0;
};

int run_eval(const EvalArgs& args) {
  const FormantTrack hyp = read_track_csv(args.hyp);
  const FormantTrack ref = read_track_csv(args.ref);
  std::optional<std::vector<LabelSpan>> labels;
  if (!args.labels.empty()) labels = read_label_file(args.labels);
  std::optional<std::set<std::string>> categories;
  if (!args.categories.empty())
    categories.emplace(args.categories.begin(), args.categories.end());

  const EvalReport report =
      evaluate(hyp, ref, EvalThresholds{args.tau_r, args.tau_a},
               labels ? &*labels : nullptr, categories ? &*categories : nullptr,
               std::filesystem::path(args.hyp).stem().string());
  std::cout << render_report(report);
  if (!args.out_csv.empty()) {
    std::ofstream out(args.out_csv);
    out << report_csv(report);
  }
  return 0;
}

struct NoiseArgs {
  std::string input, output, type = "white", noise_file;
  double snr_db = 10.0;
  uint64_t seed = 7;
};

int run_noise(const NoiseArgs& args) {
  const Waveform clean = load_waveform(args.input);
  Waveform noise;
  if (args.type == "white") {
    noise = white_noise(clean.size(), clean.sample_rate_hz, args.seed);
  } else if (args.type == "file") {
    if (args.noise_file.empty())
      throw Error("noise: --noise-file is required with --type file");
    noise = load_waveform(args.noise_file);
  } else {
    throw Error("noise: --type must be white or file");
  }
  save_waveform(args.output, mix_noise_at_snr(clean, noise, args.snr_db));
  std::cout << "wrote " << args.output << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Formant estimation and tracking with time-varying weighted "
               "sparse linear prediction"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read defaults from a key=value file");

  TrackArgs track_args;
  CLI::App* track = app.add_subcommand("track", "Track formants in a WAV file");
  track->add_option("--input,-i", track_args.input, "Input WAV")->required();
  track->add_option("--out,-o", track_args.output, "Output track CSV")->required();
  track->add_option("--gci", track_args.gci_path,
                    "GCI times file (seconds, ascending); estimated when absent");
  track->add_option("--method", track_args.method,
                    "lp|wlp|tvlp|tvqcp - l1|l2 (e.g. tvqcp-l1)")
      ->capture_default_str();
  CLI::Option* poly_opt =
      track->add_option("--poly,-q", track_args.poly, "Coefficient polynomial order")
          ->capture_default_str();
  track->add_option("--order,-p", track_args.order, "Prediction order")
      ->capture_default_str();
  CLI::Option* weighting_opt =
      track->add_option("--weighting", track_args.weighting,
                        "none|ste|residual|qcp (overrides the method default)");
  track->add_option("--window-ms", track_args.window_ms, "Analysis window length")
      ->capture_default_str();
  track->add_option("--shift-ms", track_args.shift_ms, "Frame shift")
      ->capture_default_str();
  track->add_option("--fs", track_args.fs, "Analysis sample rate (Hz)")
      ->capture_default_str();
  track->add_option("--preemph", track_args.preemph, "Pre-emphasis coefficient")
      ->capture_default_str();
  track->add_option("--dq", track_args.dq, "QCP duration quotient")
      ->capture_default_str();
  track->add_option("--pq", track_args.pq, "QCP position quotient")
      ->capture_default_str();
  track->add_option("--nramp", track_args.nramp, "QCP ramp length (samples)")
      ->capture_default_str();
  track->add_option("--dw", track_args.dw, "QCP weight floor")->capture_default_str();
  track->add_option("--ste-delay", track_args.ste_delay, "STE delay D")
      ->capture_default_str();
  track->add_option("--ste-length", track_args.ste_length, "STE length M")
      ->capture_default_str();
  track->add_option("--max-formants", track_args.max_formants, "Formants per frame")
      ->capture_default_str();

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic vowel corpus");
  synth->add_option("--out-dir", synth_args.out_dir, "Output directory")->required();
  synth->add_option("--phonations", synth_args.phonations,
                    "Comma-separated phonation presets")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_option("--f0-factors", synth_args.f0_factors,
                    "Comma-separated F0 scale factors")
      ->delimiter(',')
      ->capture_default_str();
  synth->add_option("--utterances", synth_args.utterances, "Utterances per cell")
      ->capture_default_str();
  synth->add_option("--f0", synth_args.f0, "Mean F0 before scaling (Hz)")
      ->capture_default_str();
  synth->add_option("--duration", synth_args.duration, "Utterance length (s)")
      ->capture_default_str();
  synth->add_option("--fs", synth_args.fs, "Sample rate (Hz)")->capture_default_str();
  synth->add_option("--seed", synth_args.seed, "Corpus seed")->capture_default_str();
  synth->add_option("--presets", synth_args.presets_path,
                    "Phonation preset config file");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "Score a track against a reference");
  eval->add_option("--hyp", eval_args.hyp, "Hypothesis track CSV")->required();
  eval->add_option("--ref", eval_args.ref, "Reference track CSV")->required();
  eval->add_option("--labels", eval_args.labels, "Label TSV for masking");
  eval->add_option("--categories", eval_args.categories,
                   "Categories kept when labels are given")
      ->delimiter(',');
  eval->add_option("--tau-r", eval_args.tau_r, "Relative detection threshold")
      ->capture_default_str();
  eval->add_option("--tau-a", eval_args.tau_a, "Absolute detection threshold (Hz)")
      ->capture_default_str();
  eval->add_option("--out", eval_args.out_csv, "Also write the report as CSV");

  NoiseArgs noise_args;
  CLI::App* noise = app.add_subcommand("noise", "Mix noise at a target SNR");
  noise->add_option("--input", noise_args.input, "Clean WAV")->required();
  noise->add_option("--out", noise_args.output, "Noisy WAV")->required();
  noise->add_option("--type", noise_args.type, "white|file")->capture_default_str();
  noise->add_option("--noise-file", noise_args.noise_file, "Noise WAV for --type file");
  noise->add_option("--snr-db", noise_args.snr_db, "Target SNR (dB)")
      ->capture_default_str();
  noise->add_option("--seed", noise_args.seed, "White-noise seed")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (track->parsed())
      return run_track(track_args, poly_opt->count() > 0, weighting_opt->count() > 0);
    if (synth->parsed()) return run_synth(synth_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (noise->parsed()) return run_noise(noise_args);
  } catch (const std::exception& e) {
    std::cerr << "ftrack: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
