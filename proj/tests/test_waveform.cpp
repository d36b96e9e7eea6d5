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

#include <doctest.h>

#include <cmath>
#include <random>

#include "ftrack/waveform.hpp"

using namespace ftrack;

namespace {

Waveform sine(double freq_hz, double amp, double duration_s, int fs) {
  Waveform w;
  w.sample_rate_hz = fs;
  const int64_t n = std::llround(duration_s * fs);
  w.samples.resize(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i)
    w.samples[static_cast<size_t>(i)] =
        amp * std::sin(2.0 * M_PI * freq_hz * static_cast<double>(i) / fs);
  return w;
}

}  // namespace

TEST_CASE("preemphasize: direct filter arithmetic") {
  Waveform w{{1.0, 1.0, 1.0}, 8000};
  const Waveform y = preemphasize(w, PreemphasisCoeff{0.97});
  CHECK(y.samples[0] == doctest::Approx(1.0));
  CHECK(y.samples[1] == doctest::Approx(0.03));
  CHECK(y.samples[2] == doctest::Approx(0.03));
}

TEST_CASE("preemphasize: impulse response") {
  Waveform w{{1.0, 0.0, 0.0}, 8000};
  const Waveform y = preemphasize(w, PreemphasisCoeff{0.97});
  CHECK(y.samples[0] == doctest::Approx(1.0));
  CHECK(y.samples[1] == doctest::Approx(-0.97));
  CHECK(y.samples[2] == doctest::Approx(0.0));
}

TEST_CASE("preemphasize: alpha zero is the identity") {
  Waveform w{{0.3, -0.2, 0.9}, 8000};
  const Waveform y = preemphasize(w, PreemphasisCoeff{0.0});
  for (size_t i = 0; i < w.samples.size(); ++i) CHECK(y.samples[i] == w.samples[i]);
}

TEST_CASE("preemphasize then deemphasize reconstructs the input") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Waveform w;
  w.sample_rate_hz = 8000;
  for (int i = 0; i < 4000; ++i) w.samples.push_back(uni(rng));
  const Waveform back = deemphasize(preemphasize(w), PreemphasisCoeff{});
  for (size_t i = 0; i < w.samples.size(); ++i)
    CHECK(std::abs(back.samples[i] - w.samples[i]) < 1e-9);
}

TEST_CASE("resample: DC passes through") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.assign(1600, 0.3);
  const Waveform y = resample(w, 8000);
  CHECK(y.sample_rate_hz == 8000);
  CHECK(y.size() == 800);
  for (int64_t i = 100; i < 700; ++i)
    CHECK(std::abs(y.samples[static_cast<size_t>(i)] - 0.3) < 1e-3);
}

TEST_CASE("resample: 1 kHz sinusoid matches the analytic resampling") {
  const Waveform w = sine(1000.0, 0.8, 1.0, 16000);
  const Waveform y = resample(w, 8000);
  REQUIRE(y.size() == 8000);
  // Interior comparison against the directly sampled sinusoid.
  double max_err = 0.0, power = 0.0;
  for (int64_t i = 400; i < y.size() - 400; ++i) {
    const double expected =
        0.8 * std::sin(2.0 * M_PI * 1000.0 * static_cast<double>(i) / 8000.0);
    max_err = std::max(max_err, std::abs(y.samples[static_cast<size_t>(i)] - expected));
    power += y.samples[static_cast<size_t>(i)] * y.samples[static_cast<size_t>(i)];
  }
  const double amplitude = std::sqrt(2.0 * power / static_cast<double>(y.size() - 800));
  CHECK(std::abs(amplitude - 0.8) < 0.008);  // within 1 %
  CHECK(max_err < 0.02);
}

TEST_CASE("resample: identity when rates match") {
  const Waveform w = sine(440.0, 0.5, 0.1, 8000);
  const Waveform y = resample(w, 8000);
  REQUIRE(y.size() == w.size());
  for (size_t i = 0; i < w.samples.size(); ++i) CHECK(y.samples[i] == w.samples[i]);
}

TEST_CASE("resample: up-down round trip preserves a band-limited tone") {
  const Waveform w = sine(700.0, 0.6, 0.5, 8000);
  const Waveform round = resample(resample(w, 16000), 8000);
  REQUIRE(round.size() == w.size());
  double power = 0.0;
  int64_t count = 0;
  for (int64_t i = 200; i < round.size() - 200; ++i, ++count)
    power += round.samples[static_cast<size_t>(i)] * round.samples[static_cast<size_t>(i)];
  const double amplitude = std::sqrt(2.0 * power / static_cast<double>(count));
  CHECK(std::abs(amplitude - 0.6) < 0.012);  // within 2 %
}

TEST_CASE("frame_windows: 1 s at 8 kHz tiles into ten 100 ms windows") {
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(8000, 0.0);
  const auto windows = frame_windows(w, 100.0, 10.0);
  REQUIRE(windows.size() == 10);
  for (size_t i = 0; i < windows.size(); ++i) {
    CHECK(windows[i].window.start_sample == static_cast<int64_t>(i) * 800);
    CHECK(windows[i].window.length_samples == 800);
    REQUIRE(windows[i].frame_instants.size() == 10);
    CHECK(windows[i].frame_instants.front() == 40);
    CHECK(windows[i].frame_instants.back() == 760);
  }
}

TEST_CASE("frame_windows: signal shorter than a window becomes one window") {
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(400, 0.0);  // 50 ms
  const auto windows = frame_windows(w, 100.0, 10.0);
  REQUIRE(windows.size() == 1);
  CHECK(windows[0].window.length_samples == 400);
}

TEST_CASE("frame_windows: short trailing remainder merges into the last window") {
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(8400, 0.0);  // 1.05 s
  // 50 ms remainder < 2 * 30 ms shift, so it merges: ten windows, last 150 ms.
  const auto merged = frame_windows(w, 100.0, 30.0);
  REQUIRE(merged.size() == 10);
  CHECK(merged.back().window.length_samples == 1200);
  // With a 10 ms shift the 50 ms remainder is >= 2 * shift and stays separate.
  const auto kept = frame_windows(w, 100.0, 10.0);
  REQUIRE(kept.size() == 11);
  CHECK(kept.back().window.length_samples == 400);
}

TEST_CASE("frame_windows: tiling covers the signal with no gaps or overlaps") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int64_t> len_dist(100, 30000);
  for (int trial = 0; trial < 25; ++trial) {
    Waveform w;
    w.sample_rate_hz = 8000;
    w.samples.assign(static_cast<size_t>(len_dist(rng)), 0.0);
    const auto windows = frame_windows(w, 100.0, 10.0);
    REQUIRE(!windows.empty());
    int64_t expected_start = 0;
    for (const WindowFrames& wf : windows) {
      CHECK(wf.window.start_sample == expected_start);
      CHECK(wf.window.length_samples > 0);
      expected_start += wf.window.length_samples;
    }
    CHECK(expected_start == w.size());
  }
}

TEST_CASE("frame_windows: rejects invalid window/shift combinations") {
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(800, 0.0);
  CHECK_THROWS_AS(frame_windows(w, 5.0, 10.0), Error);
  CHECK_THROWS_AS(frame_windows(w, 100.0, 0.0), Error);
}

TEST_CASE("validate rejects non-finite samples and bad rates") {
  CHECK_THROWS_AS(validate(Waveform{{0.0, std::nan("")}, 8000}), Error);
  CHECK_THROWS_AS(validate(Waveform{{0.0}, 0}), Error);
}
