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
// Subprocess tests for the ftrack binary (path injected by CMake).

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ftrack/io.hpp"
#include "ftrack/synth.hpp"

using namespace ftrack;
namespace fs = std::filesystem;

namespace {

const char* kCli = FTRACK_CLI_PATH;

struct RunResult {
  int exit_code;
  std::string stdout_text;
  std::string stderr_text;
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "ftrack_cli_tests";
  fs::create_directories(dir);
  const fs::path out = dir / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err = dir / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string(kCli) + " " + args + " >" + out.string() +
                          " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  r.stdout_text = slurp(out);
  r.stderr_text = slurp(err);
  return r;
}

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "ftrack_cli_tests";
  fs::create_directories(dir);
  return dir;
}

// One bundled vowel fixture shared by the track tests.
fs::path fixture_wav() {
  static fs::path path;
  if (path.empty()) {
    VowelSpec spec;
    spec.formants = {FormantPath{{700.0}, {60.0}}, FormantPath{{1220.0}, {80.0}},
                     FormantPath{{2600.0}, {120.0}}, FormantPath{{3400.0}, {175.0}}};
    spec.f0_hz.assign(60, 120.0);
    spec.duration_s = 0.6;
    const SynthesisResult vowel =
        synthesize_vowel(spec, phonation_preset("modal"), 99);
    path = work_dir() / "fixture.wav";
    save_waveform(path.string(), vowel.audio);
    write_gci_file((work_dir() / "fixture.gci").string(), vowel.gci_times_s);
  }
  return path;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("cli track: default flags emit a 10 ms hop CSV with four formants") {
  const fs::path out = work_dir() / "track_default.csv";
  const RunResult r = run_cli("track --input " + fixture_wav().string() + " --gci " +
                              (work_dir() / "fixture.gci").string() + " --out " +
                              out.string());
  CHECK(r.exit_code == 0);
  const FormantTrack track = read_track_csv(out.string());
  REQUIRE(track.frames.size() >= 50);
  CHECK(track.frames[1].time_s - track.frames[0].time_s == doctest::Approx(0.010));
  int full_frames = 0;
  for (const auto& frame : track.frames)
    if (frame.formants.size() == 4) ++full_frames;
  CHECK(full_frames > 0);
}

TEST_CASE("cli track: tvlp-l2 with poly 0 equals the stationary lp-l2 method") {
  const fs::path a = work_dir() / "reduction_a.csv";
  const fs::path b = work_dir() / "reduction_b.csv";
  const std::string input = " --input " + fixture_wav().string();
  CHECK(run_cli("track" + input + " --method tvlp-l2 --poly 0 --weighting none --out " +
                a.string())
            .exit_code == 0);
  CHECK(run_cli("track" + input + " --method lp-l2 --out " + b.string()).exit_code == 0);
  CHECK(read_file(a) == read_file(b));
}

TEST_CASE("cli track: missing input names the path and exits nonzero") {
  const RunResult r =
      run_cli("track --input /missing/audio.wav --out " +
              (work_dir() / "never.csv").string());
  CHECK(r.exit_code == 1);
  CHECK(r.stderr_text.find("/missing/audio.wav") != std::string::npos);
}

TEST_CASE("cli: usage errors exit with code 2") {
  CHECK(run_cli("track --out only.csv").exit_code == 2);     // missing required
  CHECK(run_cli("bogus-subcommand").exit_code == 2);
  CHECK(run_cli("track --input a.wav --out b.csv --method tvqcp-l3").exit_code != 0);
}

TEST_CASE("cli: help documents the full flag set") {
  const RunResult r = run_cli("track --help");
  CHECK(r.exit_code == 0);
  for (const char* flag : {"--dq", "--pq", "--nramp", "--dw", "--window-ms",
                           "--shift-ms", "--order", "--poly", "--weighting"})
    CHECK(r.stdout_text.find(flag) != std::string::npos);
}

TEST_CASE("cli synth: cell product count and determinism") {
  const fs::path dir_a = work_dir() / "corpus_a";
  const fs::path dir_b = work_dir() / "corpus_b";
  fs::remove_all(dir_a);
  fs::remove_all(dir_b);
  const std::string flags =
      " --phonations modal --f0-factors 1.0,2.0 --utterances 2 --duration 0.4 --seed 11";
  CHECK(run_cli("synth --out-dir " + dir_a.string() + flags).exit_code == 0);
  CHECK(run_cli("synth --out-dir " + dir_b.string() + flags).exit_code == 0);

  int wavs = 0, csvs = 0, gcis = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const std::string ext = entry.path().extension().string();
    wavs += ext == ".wav";
    csvs += ext == ".csv";
    gcis += ext == ".gci";
  }
  CHECK(wavs == 4);  // 1 phonation x 2 factors x 2 utterances
  CHECK(csvs == 4);
  CHECK(gcis == 4);
  CHECK(fs::exists(dir_a / "manifest.txt"));

  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const fs::path twin = dir_b / entry.path().filename();
    REQUIRE(fs::exists(twin));
    CHECK(read_file(entry.path()) == read_file(twin));
  }
}

TEST_CASE("cli synth: factor 2.5 cells are emitted when requested") {
  const fs::path dir = work_dir() / "corpus_25";
  fs::remove_all(dir);
  CHECK(run_cli("synth --out-dir " + dir.string() +
                " --phonations modal --f0-factors 2.5 --utterances 1 --duration 0.4")
            .exit_code == 0);
  CHECK(fs::exists(dir / "utt000_modal_f2.5.wav"));
}

TEST_CASE("cli synth: unknown phonation preset fails") {
  CHECK(run_cli("synth --out-dir " + (work_dir() / "bad").string() +
                " --phonations falsetto")
            .exit_code == 1);
}

TEST_CASE("cli eval: fixture report matches the metrics module") {
  const fs::path ref = work_dir() / "eval_ref.csv";
  const fs::path hyp = work_dir() / "eval_hyp.csv";
  {
    std::ofstream r(ref), h(hyp);
    r << "time_s,f1_hz,b1_hz,f2_hz,b2_hz,f3_hz,b3_hz,f4_hz,b4_hz\n"
      << "0.005,500,60,1500,80,,,,\n0.015,500,60,1500,80,,,,\n";
    h << "time_s,f1_hz,b1_hz,f2_hz,b2_hz,f3_hz,b3_hz,f4_hz,b4_hz\n"
      << "0.005,520,60,1450,80,,,,\n0.015,520,60,1450,80,,,,\n";
  }
  const RunResult r = run_cli("eval --hyp " + hyp.string() + " --ref " + ref.string() +
                              " --tau-r 0.1 --tau-a 100");
  CHECK(r.exit_code == 0);
  CHECK(r.stdout_text.find("tau_r=0.100") != std::string::npos);
  CHECK(r.stdout_text.find("20.0") != std::string::npos);  // F1 FEE
  CHECK(r.stdout_text.find("50.0") != std::string::npos);  // F2 FEE
}

TEST_CASE("cli noise: seeded white noise hits the requested SNR and reproduces") {
  const fs::path noisy_a = work_dir() / "noisy_a.wav";
  const fs::path noisy_b = work_dir() / "noisy_b.wav";
  const std::string flags = "noise --input " + fixture_wav().string() +
                            " --type white --snr-db 10 --seed 7 --out ";
  CHECK(run_cli(flags + noisy_a.string()).exit_code == 0);
  CHECK(run_cli(flags + noisy_b.string()).exit_code == 0);
  CHECK(read_file(noisy_a) == read_file(noisy_b));

  const Waveform clean = load_waveform(fixture_wav().string());
  const Waveform noisy = load_waveform(noisy_a.string());
  double p_clean = 0.0, p_delta = 0.0;
  for (size_t i = 0; i < clean.samples.size(); ++i) {
    p_clean += clean.samples[i] * clean.samples[i];
    const double d = noisy.samples[i] - clean.samples[i];
    p_delta += d * d;
  }
  const double snr_db = 10.0 * std::log10(p_clean / p_delta);
  CHECK(std::abs(snr_db - 10.0) < 0.1);  // quantized to 16-bit twice
}

TEST_CASE("cli noise: type file without a noise file fails") {
  CHECK(run_cli("noise --input " + fixture_wav().string() + " --type file --out " +
                (work_dir() / "x.wav").string())
            .exit_code == 1);
}
