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

#ifndef FTRACK_PREDICTOR_HPP
#define FTRACK_PREDICTOR_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "ftrack/excitation.hpp"
#include "ftrack/waveform.hpp"

namespace ftrack {

enum class Norm { l1 = 1, l2 = 2 };
enum class WeightingKind { none, ste, residual, qcp };

struct PredictorConfig {
  int order = 8;       // p, number of past samples in the predictor
  int poly_order = 3;  // q, 0 gives a stationary model
  Norm norm = Norm::l2;
  WeightingKind weighting = WeightingKind::none;
};

/// Regression form of the all-pole fit over one window of length N:
/// target[n] = x[n], regressors row n holds x[n-k] * t(n)^i for k = 1..p and
/// i = 0..q (k-major), with t(n) = n / (N-1). History samples before the
/// window come from the parent waveform when present, else zero.
struct DesignMatrices {
  Eigen::MatrixXd regressors;  // N x p(q+1)
  Eigen::VectorXd target;      // N
  Eigen::VectorXd weights;     // N, the diagonal of W
  int order = 0;
  int poly_order = 0;
};

/// Time-varying predictor in prediction form: xhat[n] = sum_k c_k[n] x[n-k]
/// with c_k[n] a degree-q polynomial in the normalized time t(n) = n/(N-1).
/// The classic LP polynomial is A(z; n) = 1 - sum_k c_k[n] z^-k; lpc_at()
/// returns its coefficients [1, a_1..a_p] with a_k = -c_k[n].
class TvModel {
 public:
  TvModel() = default;
  TvModel(Eigen::MatrixXd basis, int64_t window_length)
      : basis_(std::move(basis)), window_length_(window_length) {}

  int order() const { return static_cast<int>(basis_.rows()); }
  int poly_order() const { return static_cast<int>(basis_.cols()) - 1; }
  int64_t window_length() const { return window_length_; }
  const Eigen::MatrixXd& basis() const { return basis_; }  // p x (q+1)

  double time_at(int64_t n) const;            // t(n) in [0, 1]
  Eigen::VectorXd coeffs_at(int64_t n) const;  // c_k[n], size p
  Eigen::VectorXd lpc_at(int64_t n) const;     // [1, a_1..a_p], size p+1

 private:
  Eigen::MatrixXd basis_;  // row k-1, column i: coefficient of t^i in c_k
  int64_t window_length_ = 0;
};

struct FitResult {
  TvModel model;
  Eigen::VectorXd residual;  // e[n] = x[n] - xhat[n], per window sample
  double objective = 0.0;    // sum_n w[n] |e[n]|^m for the returned model
  int iterations = 0;        // L1 path only
};

/// Builds the (possibly weighted) regression problem for one window.
/// Throws when the window has no more samples than unknowns.
DesignMatrices build_design(const AnalysisWindow& window,
                            const PredictorConfig& cfg);
DesignMatrices build_design(const AnalysisWindow& window,
                            const PredictorConfig& cfg,
                            const WeightSeries& weights);

/// Weighted least squares through the normal equations, with a relative
/// ridge guard of 1e-10 * trace / N. Throws on rank deficiency that survives
/// the guard, with condition diagnostics in the message.
FitResult solve_l2(const DesignMatrices& d);

/// Weighted least absolute deviations. Smoothed IRLS (warm-started from the
/// L2 solution, epsilon continuation) followed by a descent to an optimal
/// vertex, so the achieved objective matches the true LP optimum to within
/// 1e-6 relative. Throws if no descent step can be taken before the
/// iteration cap (the message carries the best objective and gap estimate).
FitResult solve_l1(const DesignMatrices& d);

/// Dispatches build_design + solve_l2/solve_l1. With all-ones weights and
/// q = 0 this is conventional covariance LP; weights from qcp_weights and
/// m = 1 give the sparse quasi-closed-phase fit.
FitResult fit(const AnalysisWindow& window, const WeightSeries& weights,
              const PredictorConfig& cfg);

/// c_k[n] for window-local n; throws when n lies outside the window.
Eigen::VectorXd eval_coeffs(const TvModel& model, int64_t n);

namespace detail {
/// Huber-style smoothing of the weighted L1 objective used inside IRLS:
/// rho_eps(e) = |e| for |e| >= eps, else e^2/(2 eps) + eps/2.
double smoothed_l1_objective(const DesignMatrices& d, const Eigen::VectorXd& b,
                             double eps);
/// Gradient of smoothed_l1_objective with respect to b.
Eigen::VectorXd smoothed_l1_gradient(const DesignMatrices& d,
                                     const Eigen::VectorXd& b, double eps);
}  // namespace detail

}  // namespace ftrack

#endif  // FTRACK_PREDICTOR_HPP
