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

#include "ftrack/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

namespace ftrack {
namespace {

double time_index(int64_t n, int64_t length) {
  return length > 1 ? static_cast<double>(n) / static_cast<double>(length - 1) : 0.0;
}

double weighted_l1(const DesignMatrices& d, const Eigen::VectorXd& e) {
  return (d.weights.array() * e.array().abs()).sum();
}

FitResult make_result(const DesignMatrices& d, const Eigen::VectorXd& b,
                      Norm norm, int iterations) {
  FitResult r;
  const int q1 = d.poly_order + 1;
  Eigen::MatrixXd basis(d.order, q1);
  for (int k = 0; k < d.order; ++k)
    for (int i = 0; i < q1; ++i) basis(k, i) = b(k * q1 + i);
  r.model = TvModel(std::move(basis), d.target.size());
  r.residual = d.target - d.regressors * b;
  r.objective = norm == Norm::l2
                    ? (d.weights.array() * r.residual.array().square()).sum()
                    : weighted_l1(d, r.residual);
  r.iterations = iterations;
  return r;
}

// Weighted least squares via the normal equations with the relative ridge
// guard. Returns false when the guarded system still cannot be solved.
bool weighted_ls(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& w, Eigen::VectorXd* b,
                 double* condition_out = nullptr) {
  const int64_t n_rows = X.rows();
  Eigen::MatrixXd m = X.transpose() * w.asDiagonal() * X;
  Eigen::VectorXd rhs = X.transpose() * (w.array() * y.array()).matrix();
  const double trace = m.trace();
  if (!(trace > 0.0)) {
    // All regressors zero under this weighting; the zero model is the argmin.
    *b = Eigen::VectorXd::Zero(X.cols());
    return true;
  }
  m.diagonal().array() += 1e-10 * trace / static_cast<double>(n_rows);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(m);
  Eigen::VectorXd sol = ldlt.solve(rhs);
  const double rhs_norm = rhs.norm();
  const bool ok = ldlt.info() == Eigen::Success && sol.allFinite() &&
                  (rhs_norm == 0.0 || (m * sol - rhs).norm() <= 1e-6 * rhs_norm);
  if (!ok && condition_out) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& ev = es.eigenvalues();
    *condition_out = ev(ev.size() - 1) / std::max(ev(0), 1e-300);
  }
  if (ok) *b = sol;
  return ok;
}

// One L1 vertex: d.active rows are interpolated exactly. Descends along edge
// directions until the subgradient optimality condition holds, swapping one
// active row per step.
struct VertexDescent {
  const Eigen::MatrixXd& X;
  const Eigen::VectorXd& y;
  const Eigen::VectorXd& w;
  std::vector<int> active;
  Eigen::VectorXd b{};
  int pivots = 0;
  double violation = 0.0;  // worst |g_j| - w_j at exit, for diagnostics

  bool refactor() {
    const int dim = static_cast<int>(X.cols());
    Eigen::MatrixXd xa(dim, dim);
    Eigen::VectorXd ya(dim);
    for (int j = 0; j < dim; ++j) {
      xa.row(j) = X.row(active[j]);
      ya(j) = y(active[j]);
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(xa);
    Eigen::VectorXd sol = lu.solve(ya);
    if (!sol.allFinite()) return false;
    lu_ = std::move(lu);
    b = std::move(sol);
    return true;
  }

  // Runs the descent; returns true when the optimality condition was met.
  // Inactive rows whose residual is numerically zero are degenerate: they sit
  // on a kink, contribute one-sided |.| terms to every directional
  // derivative, and must not enter the subgradient with a noise sign.
  bool run(int max_pivots) {
    const int dim = static_cast<int>(X.cols());
    const int64_t n_rows = X.rows();
    const double w_max = w.maxCoeff();
    const double zero_tol = 1e-11 * std::max(y.cwiseAbs().maxCoeff(), 1e-300);
    if (!refactor()) return false;
    std::vector<char> in_active(n_rows, 0);
    for (int idx : active) in_active[idx] = 1;

    std::vector<int64_t> kinked;
    for (pivots = 0; pivots < max_pivots; ++pivots) {
      Eigen::VectorXd e = y - X * b;
      Eigen::VectorXd z = Eigen::VectorXd::Zero(dim);
      kinked.clear();
      for (int64_t n = 0; n < n_rows; ++n) {
        if (in_active[n]) continue;
        if (std::abs(e(n)) <= zero_tol) {
          kinked.push_back(n);
          continue;
        }
        z += (e(n) > 0.0 ? w(n) : -w(n)) * X.row(n).transpose();
      }
      // g_j = z . v_j with v_j the j-th column of X_A^{-1}; the kink budget
      // D_j = sum_k w_k |x_k . v_j| raises the optimality bar.
      const Eigen::MatrixXd inv_xa = lu_.inverse();
      const Eigen::VectorXd g = inv_xa.transpose() * z;
      Eigen::VectorXd kink_budget = Eigen::VectorXd::Zero(dim);
      for (int64_t n : kinked) {
        const Eigen::RowVectorXd s = X.row(n) * inv_xa;
        kink_budget += w(n) * s.cwiseAbs().transpose();
      }

      int worst = -1;
      double worst_excess = 1e-9 * w_max;
      for (int j = 0; j < dim; ++j) {
        const double excess = std::abs(g(j)) - w(active[j]) - kink_budget(j);
        if (excess > worst_excess) {
          worst_excess = excess;
          worst = j;
        }
      }
      violation = worst < 0 ? 0.0 : worst_excess;
      if (worst < 0) return true;  // optimal vertex

      const Eigen::VectorXd dir =
          (g(worst) > 0.0 ? 1.0 : -1.0) * inv_xa.col(worst);

      // Line search along dir: pass residual zero-crossings while the
      // directional derivative stays negative. Kinked rows are already
      // charged in the initial slope.
      struct Crossing { double t; int64_t row; double gain; };
      std::vector<Crossing> crossings;
      crossings.reserve(64);
      for (int64_t n = 0; n < n_rows; ++n) {
        if (in_active[n] || std::abs(e(n)) <= zero_tol) continue;
        const double s = X.row(n).dot(dir);
        if (s == 0.0) continue;
        const double t = e(n) / s;
        if (t > 0.0) crossings.push_back({t, n, 2.0 * w(n) * std::abs(s)});
      }
      std::sort(crossings.begin(), crossings.end(),
                [](const Crossing& a, const Crossing& b2) { return a.t < b2.t; });
      double slope = w(active[worst]) + kink_budget(worst) - std::abs(g(worst));
      int64_t entering = -1;
      for (const Crossing& c : crossings) {
        slope += c.gain;
        if (slope >= 0.0) {
          entering = c.row;
          break;
        }
      }
      if (entering < 0) return false;  // no finite minimizer along the edge

      in_active[active[worst]] = 0;
      in_active[entering] = 1;
      active[worst] = static_cast<int>(entering);
      if (!refactor()) return false;
    }
    return false;
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu_{};
};

// Greedy selection of `dim` linearly independent rows, preferring the order
// given in `candidates`. Returns an empty vector when the rows do not span.
std::vector<int> independent_rows(const Eigen::MatrixXd& X,
                                  const std::vector<int>& candidates) {
  const int dim = static_cast<int>(X.cols());
  std::vector<int> chosen;
  Eigen::MatrixXd basis(dim, dim);
  int rank = 0;
  for (int idx : candidates) {
    if (rank == dim) break;
    Eigen::VectorXd v = X.row(idx).transpose();
    const double norm0 = v.norm();
    if (norm0 <= 0.0) continue;
    for (int r = 0; r < rank; ++r) v -= basis.col(r).dot(v) * basis.col(r);
    if (v.norm() > 1e-10 * norm0) {
      basis.col(rank++) = v / v.norm();
      chosen.push_back(idx);
    }
  }
  if (rank < dim) chosen.clear();
  return chosen;
}

}  // namespace

double TvModel::time_at(int64_t n) const { return time_index(n, window_length_); }

Eigen::VectorXd TvModel::coeffs_at(int64_t n) const {
  if (n < 0 || n >= window_length_)
    throw Error("TvModel: sample index outside the model window");
  const double t = time_at(n);
  const int p = order();
  const int q = poly_order();
  Eigen::VectorXd c(p);
  for (int k = 0; k < p; ++k) {
    double acc = basis_(k, q);
    for (int i = q - 1; i >= 0; --i) acc = acc * t + basis_(k, i);
    c(k) = acc;
  }
  return c;
}

Eigen::VectorXd TvModel::lpc_at(int64_t n) const {
  const Eigen::VectorXd c = coeffs_at(n);
  Eigen::VectorXd a(c.size() + 1);
  a(0) = 1.0;
  a.tail(c.size()) = -c;
  return a;
}

DesignMatrices build_design(const AnalysisWindow& window,
                            const PredictorConfig& cfg) {
  if (cfg.order < 1) throw Error("build_design: prediction order must be >= 1");
  if (cfg.poly_order < 0) throw Error("build_design: polynomial order must be >= 0");
  const int64_t n_samples = window.length_samples;
  const int dim = cfg.order * (cfg.poly_order + 1);
  if (n_samples <= dim) {
    std::ostringstream msg;
    msg << "build_design: window of " << n_samples << " samples cannot support "
        << dim << " unknowns (p=" << cfg.order << ", q=" << cfg.poly_order << ")";
    throw Error(msg.str());
  }
  DesignMatrices d;
  d.order = cfg.order;
  d.poly_order = cfg.poly_order;
  d.target.resize(n_samples);
  d.regressors.resize(n_samples, dim);
  d.weights = Eigen::VectorXd::Ones(n_samples);
  for (int64_t n = 0; n < n_samples; ++n) {
    d.target(n) = window.sample(n);
    const double t = time_index(n, n_samples);
    for (int k = 1; k <= cfg.order; ++k) {
      const double xk = window.history(n - k);
      double tp = 1.0;
      for (int i = 0; i <= cfg.poly_order; ++i) {
        d.regressors(n, (k - 1) * (cfg.poly_order + 1) + i) = xk * tp;
        tp *= t;
      }
    }
  }
  return d;
}

DesignMatrices build_design(const AnalysisWindow& window,
                            const PredictorConfig& cfg,
                            const WeightSeries& weights) {
  DesignMatrices d = build_design(window, cfg);
  if (static_cast<int64_t>(weights.size()) != d.target.size())
    throw Error("build_design: weight series length does not match the window");
  for (int64_t n = 0; n < d.target.size(); ++n) {
    const double w = weights[static_cast<size_t>(n)];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error("build_design: weights must be finite and non-negative");
    d.weights(n) = w;
  }
  return d;
}

FitResult solve_l2(const DesignMatrices& d) {
  Eigen::VectorXd b;
  double condition = 0.0;
  if (!weighted_ls(d.regressors, d.target, d.weights, &b, &condition)) {
    std::ostringstream msg;
    msg << "solve_l2: weighted normal equations rank deficient after ridge guard"
        << " (condition estimate " << condition << ")";
    throw Error(msg.str());
  }
  return make_result(d, b, Norm::l2, 1);
}

FitResult solve_l1(const DesignMatrices& d) {
  const int64_t n_rows = d.target.size();
  const int dim = static_cast<int>(d.regressors.cols());

  // Warm start at the weighted L2 solution; fall back to zero if that fails.
  Eigen::VectorXd b;
  if (!weighted_ls(d.regressors, d.target, d.weights, &b))
    b = Eigen::VectorXd::Zero(dim);

  Eigen::VectorXd best_b = b;
  double best_obj = weighted_l1(d, d.target - d.regressors * b);
  int iterations = 0;

  // Smoothed IRLS with epsilon continuation. This only needs to land near the
  // optimum; the vertex descent below finishes the job.
  Eigen::VectorXd e = d.target - d.regressors * b;
  const double scale = std::max(e.cwiseAbs().maxCoeff(), 1e-12);
  for (double eps = 0.1 * scale; eps >= 1e-6 * scale; eps *= 0.03) {
    double last_obj = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 12; ++it) {
      ++iterations;
      Eigen::VectorXd irls_w(n_rows);
      for (int64_t n = 0; n < n_rows; ++n)
        irls_w(n) = d.weights(n) / std::max(std::abs(e(n)), eps);
      Eigen::VectorXd next;
      if (!weighted_ls(d.regressors, d.target, irls_w, &next)) break;
      e = d.target - d.regressors * next;
      b = next;
      const double obj = weighted_l1(d, e);
      if (obj < best_obj) {
        best_obj = obj;
        best_b = b;
      }
      if (std::abs(last_obj - obj) < 1e-9 * std::max(obj, 1e-300)) break;
      last_obj = obj;
    }
  }

  // Vertex descent from the IRLS solution. Zero-weight rows cannot affect the
  // objective, so they are excluded from the active-set machinery.
  std::vector<int> order_by_resid;
  order_by_resid.reserve(n_rows);
  for (int64_t n = 0; n < n_rows; ++n)
    if (d.weights(n) > 0.0) order_by_resid.push_back(static_cast<int>(n));
  if (static_cast<int>(order_by_resid.size()) > dim) {
    Eigen::VectorXd e_best = d.target - d.regressors * best_b;
    std::sort(order_by_resid.begin(), order_by_resid.end(), [&](int a, int b2) {
      return std::abs(e_best(a)) < std::abs(e_best(b2));
    });
    std::vector<int> active = independent_rows(d.regressors, order_by_resid);
    if (!active.empty()) {
      VertexDescent vd{d.regressors, d.target, d.weights, std::move(active)};
      const bool optimal = vd.run(4000);
      iterations += vd.pivots;
      if (vd.b.size() == dim) {
        const double obj = weighted_l1(d, d.target - d.regressors * vd.b);
        if (obj < best_obj) {
          best_obj = obj;
          best_b = vd.b;
        }
      }
      if (!optimal && vd.violation > 1e-6 * std::max(best_obj, 1e-12)) {
        std::ostringstream msg;
        msg << "solve_l1: vertex descent hit the pivot cap (best objective "
            << best_obj << ", stationarity violation " << vd.violation << ")";
        throw Error(msg.str());
      }
    }
  }

  return make_result(d, best_b, Norm::l1, iterations);
}

FitResult fit(const AnalysisWindow& window, const WeightSeries& weights,
              const PredictorConfig& cfg) {
  const DesignMatrices d = build_design(window, cfg, weights);
  return cfg.norm == Norm::l2 ? solve_l2(d) : solve_l1(d);
}

Eigen::VectorXd eval_coeffs(const TvModel& model, int64_t n) {
  return model.coeffs_at(n);
}

namespace detail {

double smoothed_l1_objective(const DesignMatrices& d, const Eigen::VectorXd& b,
                             double eps) {
  const Eigen::VectorXd e = d.target - d.regressors * b;
  double obj = 0.0;
  for (int64_t n = 0; n < e.size(); ++n) {
    const double a = std::abs(e(n));
    obj += d.weights(n) * (a >= eps ? a : e(n) * e(n) / (2.0 * eps) + 0.5 * eps);
  }
  return obj;
}

Eigen::VectorXd smoothed_l1_gradient(const DesignMatrices& d,
                                     const Eigen::VectorXd& b, double eps) {
  const Eigen::VectorXd e = d.target - d.regressors * b;
  Eigen::VectorXd psi(e.size());
  for (int64_t n = 0; n < e.size(); ++n) {
    const double a = std::abs(e(n));
    psi(n) = d.weights(n) * (a >= eps ? (e(n) > 0.0 ? 1.0 : -1.0) : e(n) / eps);
  }
  return -d.regressors.transpose() * psi;
}

}  // namespace detail

}  // namespace ftrack
