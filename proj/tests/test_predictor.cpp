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
#include <vector>

#include "ftrack/predictor.hpp"

using namespace ftrack;

namespace {

AnalysisWindow whole(const Waveform& w) { return AnalysisWindow{&w, 0, w.size()}; }

Waveform ar1_impulse(double coeff, int64_t n) {
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.resize(static_cast<size_t>(n));
  w.samples[0] = 1.0;
  for (int64_t i = 1; i < n; ++i)
    w.samples[static_cast<size_t>(i)] = coeff * w.samples[static_cast<size_t>(i - 1)];
  return w;
}

// Exhaustive weighted-L1 oracle for one unknown: the optimum interpolates
// some row exactly, so trying every row (plus b = 0) finds it.
double l1_oracle_single(const DesignMatrices& d) {
  const auto objective = [&](double b) {
    double obj = 0.0;
    for (int64_t i = 0; i < d.target.size(); ++i)
      obj += d.weights(i) * std::abs(d.target(i) - d.regressors(i, 0) * b);
    return obj;
  };
  double best = objective(0.0);
  for (int64_t i = 0; i < d.target.size(); ++i) {
    if (d.regressors(i, 0) == 0.0) continue;
    best = std::min(best, objective(d.target(i) / d.regressors(i, 0)));
  }
  return best;
}

}  // namespace

TEST_CASE("build_design: zero-padded history column") {
  Waveform w{{1.0, 2.0, 3.0, 4.0, 5.0}, 8000};
  const DesignMatrices d = build_design(whole(w), PredictorConfig{1, 0, Norm::l2});
  REQUIRE(d.regressors.rows() == 5);
  REQUIRE(d.regressors.cols() == 1);
  const double expected[5] = {0.0, 1.0, 2.0, 3.0, 4.0};
  for (int i = 0; i < 5; ++i) CHECK(d.regressors(i, 0) == expected[i]);
}

TEST_CASE("build_design: polynomial basis expansion") {
  Waveform w{{1.0, 2.0, 3.0, 4.0}, 8000};
  const DesignMatrices d = build_design(whole(w), PredictorConfig{1, 1, Norm::l2});
  REQUIRE(d.regressors.cols() == 2);
  for (int n = 0; n < 4; ++n) {
    const double t = static_cast<double>(n) / 3.0;
    const double past = n >= 1 ? w.samples[static_cast<size_t>(n - 1)] : 0.0;
    CHECK(d.regressors(n, 0) == doctest::Approx(past));
    CHECK(d.regressors(n, 1) == doctest::Approx(t * past));
  }
}

TEST_CASE("build_design: p=2, q=3 has 8 columns ordered k-major") {
  Waveform w{{1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0, -4.0, 5.0, -5.0}, 8000};
  const DesignMatrices d = build_design(whole(w), PredictorConfig{2, 3, Norm::l2});
  REQUIRE(d.regressors.cols() == 8);
  const int n = 5;
  const double t = 5.0 / 9.0;
  const double x1 = w.samples[4], x2 = w.samples[3];
  for (int i = 0; i <= 3; ++i) {
    CHECK(d.regressors(n, i) == doctest::Approx(x1 * std::pow(t, i)));
    CHECK(d.regressors(n, 4 + i) == doctest::Approx(x2 * std::pow(t, i)));
  }
}

TEST_CASE("build_design: window too short for the requested order") {
  Waveform w{{1.0, 2.0, 3.0}, 8000};
  CHECK_THROWS_AS(build_design(whole(w), PredictorConfig{2, 1, Norm::l2}), Error);
}

TEST_CASE("solve_l2: noiseless AR(1) recovery") {
  const Waveform w = ar1_impulse(0.9, 60);
  const DesignMatrices d = build_design(whole(w), PredictorConfig{1, 0, Norm::l2});
  const FitResult r = solve_l2(d);
  // Prediction form carries +0.9; the classic A(z) coefficient is -0.9.
  CHECK(std::abs(r.model.coeffs_at(10)(0) - 0.9) < 1e-9);
  CHECK(std::abs(r.model.lpc_at(10)(1) - (-0.9)) < 1e-9);
}

TEST_CASE("solve_l2: a zero-residual model is weight-independent") {
  const Waveform w = ar1_impulse(0.9, 60);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(0.05, 3.0);
  WeightSeries weights;
  for (int64_t i = 0; i < w.size(); ++i) weights.weights.push_back(uni(rng));
  const FitResult r =
      fit(whole(w), weights, PredictorConfig{1, 0, Norm::l2});
  CHECK(std::abs(r.model.coeffs_at(0)(0) - 0.9) < 1e-9);
}

TEST_CASE("solve_l2: objective matches a dense normal-equation oracle") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Waveform w;
    w.sample_rate_hz = 8000;
    for (int i = 0; i < 20; ++i) w.samples.push_back(gauss(rng));
    WeightSeries weights;
    for (int i = 0; i < 20; ++i) weights.weights.push_back(0.1 + std::abs(gauss(rng)));

    const DesignMatrices d =
        build_design(whole(w), PredictorConfig{2, 1, Norm::l2}, weights);
    const FitResult r = solve_l2(d);

    // Independent dense solve of X^T W X b = X^T W y without the ridge guard.
    const Eigen::MatrixXd m =
        d.regressors.transpose() * d.weights.asDiagonal() * d.regressors;
    const Eigen::VectorXd rhs =
        d.regressors.transpose() * (d.weights.array() * d.target.array()).matrix();
    const Eigen::VectorXd b = m.fullPivLu().solve(rhs);
    const Eigen::VectorXd e = d.target - d.regressors * b;
    const double oracle = (d.weights.array() * e.array().square()).sum();
    CHECK(std::abs(r.objective - oracle) <= 1e-8 * std::max(oracle, 1e-12));
  }
}

TEST_CASE("solve_l1: sparse impulse train leaves AR(2) coefficients exact") {
  const double c1 = 2.0 * 0.9 * std::cos(0.7), c2 = -0.81;
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(400, 0.0);
  const int impulses[] = {0, 80, 170, 260, 350};
  const double amps[] = {1.0, -0.8, 0.6, 0.9, -0.7};
  for (int i = 0; i < 400; ++i) {
    double v = 0.0;
    for (int k = 0; k < 5; ++k)
      if (impulses[k] == i) v += amps[k];
    if (i >= 1) v += c1 * w.samples[static_cast<size_t>(i - 1)];
    if (i >= 2) v += c2 * w.samples[static_cast<size_t>(i - 2)];
    w.samples[static_cast<size_t>(i)] = v;
  }
  const FitResult r =
      solve_l1(build_design(whole(w), PredictorConfig{2, 0, Norm::l1}));
  CHECK(std::abs(r.model.coeffs_at(0)(0) - c1) < 1e-6);
  CHECK(std::abs(r.model.coeffs_at(0)(1) - c2) < 1e-6);
  // The residual carries exactly the injected impulses.
  int nonzero = 0;
  for (int64_t i = 0; i < r.residual.size(); ++i)
    if (std::abs(r.residual(i)) > 1e-8) ++nonzero;
  CHECK(nonzero == 5);
}

TEST_CASE("solve_l1: objective matches the exhaustive vertex oracle") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> wdist(0.05, 2.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 6 + static_cast<int>(rng() % 7);  // 6..12
    Waveform w;
    w.sample_rate_hz = 8000;
    for (int i = 0; i < n; ++i) w.samples.push_back(gauss(rng));
    WeightSeries weights;
    for (int i = 0; i < n; ++i) weights.weights.push_back(wdist(rng));

    const DesignMatrices d =
        build_design(whole(w), PredictorConfig{1, 0, Norm::l1}, weights);
    const FitResult r = solve_l1(d);
    const double oracle = l1_oracle_single(d);
    CHECK(r.objective <= oracle * (1.0 + 1e-6) + 1e-12);
    CHECK(r.objective >= oracle * (1.0 - 1e-6) - 1e-12);
  }
}

TEST_CASE("solve_l1: all-zero target gives the zero model") {
  Waveform w{std::vector<double>(30, 0.0), 8000};
  const FitResult r =
      solve_l1(build_design(whole(w), PredictorConfig{2, 1, Norm::l1}));
  CHECK(r.objective == 0.0);
  CHECK(r.model.coeffs_at(0).norm() == 0.0);
  CHECK(r.model.coeffs_at(29).norm() == 0.0);
}

TEST_CASE("fit: all-ones weights with q=0, m=2 equals solve_l2 exactly") {
  const Waveform w = ar1_impulse(0.8, 80);
  const PredictorConfig cfg{2, 0, Norm::l2};
  const FitResult via_fit = fit(whole(w), uniform_weights(whole(w)), cfg);
  const FitResult direct = solve_l2(build_design(whole(w), cfg));
  CHECK(via_fit.objective == direct.objective);
  CHECK((via_fit.model.basis() - direct.model.basis()).norm() == 0.0);
}

TEST_CASE("fit: q=3 on a stationary signal keeps trajectories flat") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> amp(0.7, 1.3);
  const double c1 = 2.0 * 0.92 * std::cos(2.0 * M_PI * 700.0 / 8000.0);
  const double c2 = -0.92 * 0.92;
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(800, 0.0);
  for (int i = 0; i < 800; ++i) {
    double v = i % 67 == 0 ? amp(rng) : 0.0;  // pitch-like excitation
    if (i >= 1) v += c1 * w.samples[static_cast<size_t>(i - 1)];
    if (i >= 2) v += c2 * w.samples[static_cast<size_t>(i - 2)];
    w.samples[static_cast<size_t>(i)] = v;
  }
  const FitResult r =
      fit(whole(w), uniform_weights(whole(w)), PredictorConfig{2, 3, Norm::l2});
  for (int k = 0; k < 2; ++k) {
    double lo = 1e300, hi = -1e300, mean = 0.0;
    for (int64_t n = 0; n < 800; n += 10) {
      const double c = r.model.coeffs_at(n)(k);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
      mean += std::abs(c);
    }
    mean /= 80.0;
    CHECK((hi - lo) / mean < 0.05);
  }
}

TEST_CASE("eval_coeffs: q=0 coefficients are constant in n") {
  const Waveform w = ar1_impulse(0.7, 40);
  const FitResult r =
      fit(whole(w), uniform_weights(whole(w)), PredictorConfig{1, 0, Norm::l2});
  const double at0 = eval_coeffs(r.model, 0)(0);
  const double at39 = eval_coeffs(r.model, 39)(0);
  CHECK(at0 == at39);
}

TEST_CASE("eval_coeffs: polynomial evaluation and window-edge consistency") {
  Eigen::MatrixXd basis(1, 2);
  basis << 1.0, 1.0;  // c_1(t) = 1 + t
  const TvModel model(basis, 101);
  CHECK(eval_coeffs(model, 50)(0) == doctest::Approx(1.5));
  CHECK(eval_coeffs(model, 0)(0) == doctest::Approx(1.0));
  CHECK(eval_coeffs(model, 100)(0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(eval_coeffs(model, 101), Error);
  CHECK_THROWS_AS(eval_coeffs(model, -1), Error);
}

TEST_CASE("property: amplitude scaling leaves the argmin unchanged") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 0.5);
  Waveform w;
  w.sample_rate_hz = 8000;
  w.samples.assign(200, 0.0);
  for (int i = 0; i < 200; ++i) {
    double v = gauss(rng);
    if (i >= 1) v += 1.2 * w.samples[static_cast<size_t>(i - 1)];
    if (i >= 2) v += -0.72 * w.samples[static_cast<size_t>(i - 2)];
    w.samples[static_cast<size_t>(i)] = v;
  }
  Waveform scaled = w;
  for (double& s : scaled.samples) s *= 10.0;

  for (Norm norm : {Norm::l2, Norm::l1}) {
    const PredictorConfig cfg{2, 1, norm};
    const FitResult a = fit(whole(w), uniform_weights(whole(w)), cfg);
    const FitResult b = fit(whole(scaled), uniform_weights(whole(scaled)), cfg);
    CHECK((a.model.basis() - b.model.basis()).norm() <
          1e-8 * std::max(1.0, a.model.basis().norm()));
    const double m = norm == Norm::l2 ? 2.0 : 1.0;
    CHECK(b.objective ==
          doctest::Approx(a.objective * std::pow(10.0, m)).epsilon(1e-8));
  }

  // With STE weights rebuilt on the scaled signal the objective picks up the
  // extra c^2 but the argmin still does not move.
  const PredictorConfig cfg{2, 0, Norm::l2};
  const FitResult a =
      fit(whole(w), ste_weights(whole(w)), cfg);
  const FitResult b =
      fit(whole(scaled), ste_weights(whole(scaled)), cfg);
  CHECK((a.model.basis() - b.model.basis()).norm() <
        1e-8 * std::max(1.0, a.model.basis().norm()));
  CHECK(b.objective == doctest::Approx(a.objective * 1e4).epsilon(1e-8));
}

TEST_CASE("property: the L1 solution dominates the L2 solution in L1 norm") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Waveform w;
    w.sample_rate_hz = 8000;
    for (int i = 0; i < 50; ++i) w.samples.push_back(gauss(rng));
    const DesignMatrices d = build_design(whole(w), PredictorConfig{2, 1, Norm::l1});
    const FitResult l1 = solve_l1(d);
    const FitResult l2 = solve_l2(d);
    const double l1_of_l2 = (d.weights.array() * l2.residual.array().abs()).sum();
    CHECK(l1.objective <= l1_of_l2 * (1.0 + 1e-12));
  }
}

TEST_CASE("property: all-ones weighted path equals the plain normal equations") {
  const Waveform w = ar1_impulse(0.85, 100);
  const PredictorConfig cfg{2, 0, Norm::l2};
  const FitResult weighted = fit(whole(w), uniform_weights(whole(w)), cfg);

  // Unweighted normal equations assembled directly from lag products.
  const DesignMatrices d = build_design(whole(w), cfg);
  const Eigen::MatrixXd m = d.regressors.transpose() * d.regressors;
  const Eigen::VectorXd rhs = d.regressors.transpose() * d.target;
  const Eigen::VectorXd b = m.fullPivLu().solve(rhs);
  CHECK((weighted.model.basis().col(0) - b).norm() < 1e-8);
}

TEST_CASE("property: stored objective matches a recomputation from residuals") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Waveform w;
  w.sample_rate_hz = 8000;
  for (int i = 0; i < 120; ++i) w.samples.push_back(gauss(rng));
  WeightSeries weights;
  for (int i = 0; i < 120; ++i) weights.weights.push_back(0.2 + std::abs(gauss(rng)));

  for (Norm norm : {Norm::l1, Norm::l2}) {
    const DesignMatrices d =
        build_design(whole(w), PredictorConfig{3, 1, norm}, weights);
    const FitResult r = norm == Norm::l1 ? solve_l1(d) : solve_l2(d);
    double recomputed = 0.0;
    for (int64_t i = 0; i < r.residual.size(); ++i)
      recomputed += d.weights(i) * (norm == Norm::l1
                                        ? std::abs(r.residual(i))
                                        : r.residual(i) * r.residual(i));
    CHECK(std::abs(recomputed - r.objective) <= 1e-10 * std::max(recomputed, 1e-12));
  }
}

TEST_CASE("property: smoothed-L1 gradient agrees with central differences") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    Waveform w;
    w.sample_rate_hz = 8000;
    for (int i = 0; i < 30; ++i) w.samples.push_back(gauss(rng));
    WeightSeries weights;
    for (int i = 0; i < 30; ++i) weights.weights.push_back(0.3 + std::abs(gauss(rng)));
    const DesignMatrices d =
        build_design(whole(w), PredictorConfig{2, 1, Norm::l1}, weights);

    Eigen::VectorXd b(4);
    for (int i = 0; i < 4; ++i) b(i) = gauss(rng);
    const double eps = 1e-3;
    const Eigen::VectorXd grad = detail::smoothed_l1_gradient(d, b, eps);
    Eigen::VectorXd fd(4);
    const double h = 1e-6;
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd hi = b, lo = b;
      hi(i) += h;
      lo(i) -= h;
      fd(i) = (detail::smoothed_l1_objective(d, hi, eps) -
               detail::smoothed_l1_objective(d, lo, eps)) /
              (2.0 * h);
    }
    CHECK((grad - fd).norm() <= 1e-4 * std::max(1.0, fd.norm()));
  }
}
