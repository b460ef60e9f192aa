/* Copyright (C) 2026 The harnack-lab authors
 * This program is Licensed under the Apache License, Version 2.0
 * (the "License"); you may not use this file except in compliance
 * with the License. You may obtain a copy of the License at
 *   http://www.apache.org/licenses/LICENSE-2.0
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. See accompanying LICENSE file.
 */
/* degiorgi.hpp - truncation levels, cutoffs, energies and martingale
 * suprema of the De Giorgi iteration on [0, 1] x B_1.
 *
 *   b_k = 1/2 + 2^{-k-1},  I_k = [1 - b_k^2, 1]
 *   u_{k,a} = (u - a (1 - 2^{-k}))^+
 *   U_{k,a} = || u_{k,a} phi_k ||^2_{4,2, I_k x B_1}
 *   X_{k,t} = eps sum_i int <g_i(u), u_{k+1,a} phi_{k+1}^2> dw^i
 */
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fields.hpp"
#include "solver.hpp"

namespace harnack {

inline double b_seq(int k) {
  require(k >= 0, "b_k needs k >= 0");
  return 0.5 + std::ldexp(1.0, -k - 1);
}

struct Interval {
  double lo, hi;
};

inline Interval time_window(int k) {
  const double b = b_seq(k);
  return {1.0 - b * b, 1.0};
}

// Clamped cubic smoothstep in |x|_inf between b_k and b_{k-1}; phi_0 = 1
// on B_1. Peak slope is 1.5 / (b_{k-1} - b_k) = 3 2^k <= n 2^{k+2}.
struct CutoffFamily {
  int n = 1;

  double operator()(int k, const Point& x) const {
    double r = 0.0;
    for (int d = 0; d < x.dim; ++d) r = std::max(r, std::abs(x[d]));
    return radial(k, r);
  }
  static double radial(int k, double r) {
    require(k >= 0, "cutoff index must be nonnegative");
    if (k == 0) return r < 1.0 ? 1.0 : 0.0;
    const double inner = b_seq(k), outer = b_seq(k - 1);
    if (r <= inner) return 1.0;
    if (r >= outer) return 0.0;
    const double s = (outer - r) / (outer - inner);
    return s * s * (3.0 - 2.0 * s);
  }
  static double slope_bound(int k, int n) { return n * std::ldexp(1.0, k + 2); }
};

inline double cutoff(const CutoffFamily& fam, int k, const Point& x) { return fam(k, x); }

inline double truncation_level(int k, double a) { return a * (1.0 - std::ldexp(1.0, -k)); }

inline FieldPath truncate(const FieldPath& path, int k, double a) {
  require(a > 0.0, "truncation level a must be positive");
  require(k >= 0, "truncation index must be nonnegative");
  FieldPath out = path;
  const double c = truncation_level(k, a);
  for (double& v : out.u) v = std::max(v - c, 0.0);
  return out;
}

namespace detail {

inline SpaceTimeRect window_rect(int k, int n) {
  const Interval I = time_window(k);
  return SpaceTimeRect(I.lo, I.hi, Ball(Point::origin(n), 1.0));
}

inline std::vector<double> cutoff_on(const CutoffFamily& fam, int k, const Grid& g,
                                     const std::vector<std::size_t>& nodes) {
  std::vector<double> v(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) v[i] = fam(k, g.point(nodes[i]));
  return v;
}

inline double zero_floor(double v) { return v < 1e-30 ? 0.0 : v; }

}  // namespace detail

inline double energy_U(const FieldPath& path, const CutoffFamily& fam, int k, double a) {
  require(a > 0.0, "truncation level a must be positive");
  const RegionIndex r = region_index(path, detail::window_rect(k, path.grid.n));
  const std::vector<double> phi = detail::cutoff_on(fam, k, path.grid, r.nodes);
  // map node -> position in r.nodes for the accessor
  std::vector<double> phi_full(path.nodes(), 0.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) phi_full[r.nodes[i]] = phi[i];
  const double c = truncation_level(k, a);
  const double norm = lpq_norm_of(path.grid, path.axis, r, {4.0, 2.0},
                                  [&](std::size_t j, std::size_t kk) {
                                    return std::max(path.at(j, kk) - c, 0.0) * phi_full[kk];
                                  });
  return detail::zero_floor(norm * norm);
}

// Partial sums X_j of the discrete martingale (X_0 = 0) over the whole path.
inline std::vector<double> martingale_series(const FieldPath& path, const CoefficientModel& cm,
                                             const CutoffFamily& fam, int k, double a,
                                             double eps) {
  detail::check_noise_for(path, cm);
  const Grid& g = path.grid;
  const std::vector<std::size_t> nodes = ball_nodes(g, Ball(Point::origin(g.n), 1.0));
  const std::vector<double> phi = detail::cutoff_on(fam, k + 1, g, nodes);
  const double c = truncation_level(k + 1, a);
  const std::size_t N = g.size();
  SourceEvaluator src(g, cm);
  std::vector<double> gv(N * std::max(cm.m, 1));
  std::vector<double> X(path.samples(), 0.0);
  for (std::size_t j = 0; j < path.axis.steps; ++j) {
    double inc = 0.0;
    if (cm.m > 0) {
      const double* u = path.snap(j);
      bool any = false;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (u[nodes[i]] > c && phi[i] > 0.0) {
          any = true;
          break;
        }
      if (any) {
        src.g(path.time(j), u, gv.data());
        const double* dW = path.increments(j);
        for (int ch = 0; ch < cm.m; ++ch) {
          double ip = 0.0;
          const double* gi = gv.data() + ch * N;
          for (std::size_t i = 0; i < nodes.size(); ++i) {
            const std::size_t kk = nodes[i];
            const double w = std::max(u[kk] - c, 0.0) * phi[i] * phi[i];
            ip += gi[kk] * w;
          }
          inc += ip * g.cell_volume() * dW[ch];
        }
      }
    }
    X[j + 1] = X[j] + eps * inc;
  }
  return X;
}

// X*_k = sup over s <= t in I_k of X_t - X_s, one pass with a running min.
inline double martingale_X(const FieldPath& path, const CoefficientModel& cm,
                           const CutoffFamily& fam, int k, double a, double eps) {
  require(a > 0.0 && eps > 0.0 && eps <= 1.0, "need a > 0 and 0 < eps <= 1");
  const std::vector<double> X = martingale_series(path, cm, fam, k, a, eps);
  const Interval I = time_window(k);
  const auto [j0, j1] = path.axis.closed(I.lo, I.hi);
  double lo = std::numeric_limits<double>::infinity(), best = 0.0;
  for (std::size_t j = j0; j < j1; ++j) {
    lo = std::min(lo, X[j]);
    best = std::max(best, X[j] - lo);
  }
  return best;
}

struct IterationParams {
  double a = 1.0;
  double eps = 1.0;
  int K = 8;
  double delta = 0.25;
};

struct TraceRow {
  int k;
  double U;
  double X;          // X*_k
  double qv_bound;   // windowed QV of X_k / (eps^2 U_k^2)
  double C_hat;      // per-k constant of the iteration inequality (k >= 1)
  double log_ratio;  // log(U_k / U_{k-1}), NaN when undefined
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  double C_hat = 0.0;       // max over k of C_hat_k
  double fitted_rate = 0.0; // least squares slope of log U_k against k
  bool decays = false;
  bool reaches_zero = false;
};

inline IterationTrace iteration_trace(const FieldPath& path, const CoefficientModel& cm,
                                      const CutoffFamily& fam, const IterationParams& p) {
  require(p.a > 0.0 && p.eps > 0.0 && p.eps <= 1.0, "need a > 0 and 0 < eps <= 1");
  require(p.K >= 1 && p.delta > 0.0, "need K >= 1 and delta > 0");
  IterationTrace tr;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int k = 0; k <= p.K; ++k) {
    TraceRow row{k, energy_U(path, fam, k, p.a), 0.0, 0.0, 0.0, nan};
    const std::vector<double> X = martingale_series(path, cm, fam, k, p.a, p.eps);
    const Interval I = time_window(k);
    const auto [j0, j1] = path.axis.closed(I.lo, I.hi);
    double lo = std::numeric_limits<double>::infinity(), best = 0.0, qv = 0.0;
    for (std::size_t j = j0; j < j1; ++j) {
      lo = std::min(lo, X[j]);
      best = std::max(best, X[j] - lo);
      if (j + 1 < j1) qv += (X[j + 1] - X[j]) * (X[j + 1] - X[j]);
    }
    row.X = best;
    const double den = p.eps * p.eps * row.U * row.U;
    row.qv_bound = qv == 0.0 ? 0.0 : (den > 0.0 ? qv / den : std::numeric_limits<double>::infinity());
    if (k >= 1) {
      const TraceRow& prev = tr.rows.back();
      if (row.U == 0.0) {
        row.C_hat = 0.0;
      } else {
        const double d = (prev.U + prev.X) * std::pow(prev.U, p.delta);
        row.C_hat = d > 0.0 ? std::pow(row.U * std::pow(p.a, 2.0 * p.delta) / d, 1.0 / k)
                            : std::numeric_limits<double>::infinity();
      }
      if (row.U > 0.0 && prev.U > 0.0) row.log_ratio = std::log(row.U / prev.U);
      tr.C_hat = std::max(tr.C_hat, row.C_hat);
    }
    tr.rows.push_back(row);
  }
  // slope of log U over the strictly positive entries
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (const TraceRow& r : tr.rows)
    if (r.U > 0.0) {
      sx += r.k;
      sy += std::log(r.U);
      sxx += r.k * r.k;
      sxy += r.k * std::log(r.U);
      ++cnt;
    }
  if (cnt >= 2) tr.fitted_rate = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  bool mono = true;
  for (std::size_t i = 1; i < tr.rows.size(); ++i)
    if (tr.rows[i].U > tr.rows[i - 1].U) mono = false;
  tr.reaches_zero = tr.rows.back().U == 0.0;
  tr.decays = mono && (tr.reaches_zero || tr.rows.back().U < tr.rows.front().U);
  return tr;
}

}  // namespace harnack
