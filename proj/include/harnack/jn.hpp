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
/* jn.hpp - John-Nirenberg diagnostics on h = -log(u + mu): cube-weighted
 * averages H, compensating martingales M, the local square-root oscillation
 * check, level-set decay on D0+- and the reverse Cauchy-Schwarz tail.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "cubes.hpp"
#include "fields.hpp"
#include "solver.hpp"
#include "stats.hpp"

namespace harnack {

struct LogField {
  const FieldPath* source = nullptr;
  double mu = 1.0;
  std::vector<double> h;      // same layout as source->u
  std::size_t clamped = 0;    // nodes with u < 0 clamped before the log

  double at(std::size_t j, std::size_t k) const { return h[j * source->nodes() + k]; }
};

inline LogField logfield(const FieldPath& path, double mu) {
  require(mu > 0.0, "logfield needs mu > 0");
  LogField lf;
  lf.source = &path;
  lf.mu = mu;
  lf.h.resize(path.u.size());
  for (std::size_t i = 0; i < path.u.size(); ++i) {
    const double u = path.u[i];
    if (!(u + mu > 0.0)) {
      const std::size_t j = i / path.nodes(), k = i % path.nodes();
      std::ostringstream os;
      os << "u + mu <= 0 at sample " << j << " node " << k << " (u = " << u << ")";
      throw DomainError(os.str());
    }
    if (u < 0.0) ++lf.clamped;
    lf.h[i] = -std::log(std::max(u, 0.0) + mu);
  }
  return lf;
}

// Master cutoff in |y|_inf: 1 on B_{1/2}, 0 outside B_{3/4}, smoothstep
// between. Radial and monotone, so its level sets are max-norm balls.
inline double master_cutoff(double r) {
  if (r <= 0.5) return 1.0;
  if (r >= 0.75) return 0.0;
  const double s = (0.75 - r) / 0.25;
  return s * s * (3.0 - 2.0 * s);
}

// phi^2_{B_z(w)} on the nodes of B_{3z/2}(w) and |V| = int phi^2.
struct CubeWeights {
  std::vector<std::size_t> nodes;
  std::vector<double> w2;
  double V = 0.0;
};

inline CubeWeights cube_weights(const Grid& g, const Cube& c) {
  const Ball big(c.w, 1.5 * c.z);
  if (!ball_inside_box(g, big))
    throw InvalidArgument("enlarged cube ball B_{3z/2} exits the grid box");
  CubeWeights cw;
  for (std::size_t k : ball_nodes(g, big)) {
    const double r = max_dist(g.point(k), c.w) / (2.0 * c.z);
    const double p = master_cutoff(r);
    if (p <= 0.0) continue;
    cw.nodes.push_back(k);
    cw.w2.push_back(p * p);
    cw.V += p * p;
  }
  cw.V *= g.cell_volume();
  if (cw.nodes.empty()) throw EmptyRegion("cube ball contains no grid node");
  return cw;
}

namespace detail {

inline std::size_t sample_near(const TimeAxis& a, double t) {
  const double r = (t - a.t0) / a.dt;
  if (r < -1e-6 || r > static_cast<double>(a.steps) + 1e-6)
    throw InvalidArgument("cube time extent leaves the path");
  return static_cast<std::size_t>(std::llround(std::clamp(r, 0.0, static_cast<double>(a.steps))));
}

inline double weighted_avg(const Grid& g, const CubeWeights& cw, const double* v) {
  double s = 0.0;
  for (std::size_t i = 0; i < cw.nodes.size(); ++i) s += v[cw.nodes[i]] * cw.w2[i];
  return s * g.cell_volume() / cw.V;
}

}  // namespace detail

// H(t) = |V|^{-1} int h(l + t, y) phi^2(y) dy, t measured from the center.
inline double weighted_average_H(const LogField& lf, const Cube& cube, double t) {
  require(std::abs(t) <= 4 * cube.s * (1.0 + 1e-9), "t outside the cube time extent");
  const FieldPath& p = *lf.source;
  const CubeWeights cw = cube_weights(p.grid, cube);
  const std::size_t j = detail::sample_near(p.axis, cube.l + t);
  return detail::weighted_avg(p.grid, cw, lf.h.data() + j * p.nodes());
}

struct MSeries {
  std::vector<double> t;     // offsets from the cube center, starting at 0
  std::vector<double> M;     // M(0) = 0
  std::vector<double> qv;    // running sum of squared increments
  double qv_ratio = 0.0;     // QV(4s) / 4s
};

// M(t) = sum_i int_l^{l+t} |V|^{-1} int g_i(u) (u + mu)^{-1} phi^2 dy dw^i
inline MSeries martingale_M(const LogField& lf, const CoefficientModel& cm, const Cube& cube) {
  const FieldPath& p = *lf.source;
  detail::check_noise_for(p, cm);
  const CubeWeights cw = cube_weights(p.grid, cube);
  const std::size_t j0 = detail::sample_near(p.axis, cube.l);
  const std::size_t j1 = detail::sample_near(p.axis, cube.l + 4 * cube.s);
  MSeries ms;
  ms.t.push_back(0.0);
  ms.M.push_back(0.0);
  ms.qv.push_back(0.0);
  std::vector<double> gv(std::max(cm.m, 1));
  std::vector<double> acc(std::max(cm.m, 1));
  for (std::size_t j = j0; j < j1; ++j) {
    double inc = 0.0;
    if (cm.m > 0) {
      std::fill(acc.begin(), acc.end(), 0.0);
      const double* u = p.snap(j);
      const double tj = p.time(j);
      for (std::size_t i = 0; i < cw.nodes.size(); ++i) {
        const std::size_t k = cw.nodes[i];
        cm.g(tj, p.grid.point(k), u[k], gv.data());
        const double inv = 1.0 / (std::max(u[k], 0.0) + lf.mu);
        for (int ch = 0; ch < cm.m; ++ch) acc[ch] += gv[ch] * inv * cw.w2[i];
      }
      const double* dW = p.increments(j);
      for (int ch = 0; ch < cm.m; ++ch)
        inc += acc[ch] * p.grid.cell_volume() / cw.V * dW[ch];
    }
    ms.t.push_back(p.time(j + 1) - cube.l);
    ms.M.push_back(ms.M.back() + inc);
    ms.qv.push_back(ms.qv.back() + inc * inc);
  }
  const double T = ms.t.back();
  ms.qv_ratio = T > 0.0 ? ms.qv.back() / T : 0.0;
  return ms;
}

// Same realization read backwards in time: snapshot j is the original
// snapshot M - j and increment j is minus the original increment M - 1 - j.
inline FieldPath reverse_path(const FieldPath& p) {
  FieldPath r(p.grid, p.axis, p.m);
  r.seed = p.seed;
  const std::size_t M = p.axis.steps, N = p.nodes();
  for (std::size_t j = 0; j <= M; ++j) std::copy(p.snap(M - j), p.snap(M - j) + N, r.snap(j));
  if (p.has_noise) {
    r.dW.resize(p.dW.size());
    const std::size_t m = static_cast<std::size_t>(p.m);
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t i = 0; i < m; ++i) r.dW[j * m + i] = -p.dW[(M - 1 - j) * m + i];
    r.has_noise = true;
  }
  return r;
}

inline Cube reflect_cube(const Cube& c, const TimeAxis& a) {
  Cube r = c;
  r.l = a.t0 + a.horizon() - c.l;
  return r;
}

struct CubeStats {
  Cube cube;
  double a_C = 0.0;
  std::vector<double> H_series;  // H(t) on the samples of the cube extent
  MSeries M_series;
  double plus_avg = 0.0;
  double minus_avg = 0.0;
};

namespace detail {

// Average over C+ of sqrt(sign * (h - M(t - l) - a))^+ ; sign = -1 gives
// sqrt((M + a - h)^+), used on the reversed path for C-.
inline double sqrt_excess_avg(const LogField& lf, const MSeries& ms, const Cube& cube,
                              double a, double sign) {
  const FieldPath& p = *lf.source;
  const RegionIndex r = region_index(p, SpaceTimeRect(cube.l, cube.l + 4 * cube.s, Ball(cube.w, cube.z)));
  const std::size_t j0 = sample_near(p.axis, cube.l);
  double acc = 0.0;
  for (std::size_t j = r.j_first; j < r.j_last; ++j) {
    const double Mj = ms.M[std::min(j - j0, ms.M.size() - 1)];
    for (std::size_t k : r.nodes) {
      const double e = sign * (lf.at(j, k) - Mj - a);
      if (e > 0.0) acc += std::sqrt(e);
    }
  }
  return acc / static_cast<double>(r.pairs());
}

inline std::vector<double> H_series_of(const LogField& lf, const CubeWeights& cw, const Cube& c) {
  const FieldPath& p = *lf.source;
  const std::size_t j0 = sample_near(p.axis, c.l - 4 * c.s);
  const std::size_t j1 = sample_near(p.axis, c.l + 4 * c.s);
  std::vector<double> out;
  for (std::size_t j = j0; j <= j1; ++j)
    out.push_back(weighted_avg(p.grid, cw, lf.h.data() + j * p.nodes()));
  return out;
}

}  // namespace detail

// Forward and reversed views of one path for repeated cube checks.
struct JNContext {
  const FieldPath* path;
  const CoefficientModel* cm;
  double mu;
  LogField fwd;
  FieldPath rev_path;
  LogField rev;

  JNContext(const FieldPath& p, const CoefficientModel& m, double mu_)
      : path(&p), cm(&m), mu(mu_), fwd(logfield(p, mu_)), rev_path(reverse_path(p)) {
    rev = logfield(rev_path, mu_);
  }
  JNContext(const JNContext&) = delete;
  JNContext& operator=(const JNContext&) = delete;
};

inline CubeStats local_bmo_check(const JNContext& ctx, const Cube& cube, bool keep_series = false) {
  CubeStats st;
  st.cube = cube;
  const CubeWeights cw = cube_weights(ctx.path->grid, cube);
  const std::size_t jc = detail::sample_near(ctx.path->axis, cube.l);
  st.a_C = detail::weighted_avg(ctx.path->grid, cw, ctx.fwd.h.data() + jc * ctx.path->nodes());
  st.M_series = martingale_M(ctx.fwd, *ctx.cm, cube);
  st.plus_avg = detail::sqrt_excess_avg(ctx.fwd, st.M_series, cube, st.a_C, 1.0);
  const Cube rc = reflect_cube(cube, ctx.path->axis);
  const MSeries rm = martingale_M(ctx.rev, *ctx.cm, rc);
  st.minus_avg = detail::sqrt_excess_avg(ctx.rev, rm, rc, st.a_C, -1.0);
  if (keep_series) st.H_series = detail::H_series_of(ctx.fwd, cw, cube);
  else st.M_series = MSeries{{}, {}, {}, st.M_series.qv_ratio};
  return st;
}

inline CubeStats local_bmo_check(const LogField& lf, const CoefficientModel& cm, const Cube& cube) {
  const JNContext ctx(*lf.source, cm, lf.mu);
  return local_bmo_check(ctx, cube, true);
}

struct DecayFit {
  double B = 0.0;
  double b = 0.0;   // decay rate in alpha (the b/A of the bound)
  double r2 = 0.0;
  int points = 0;
};

// log frac = log B - b alpha over the points with frac > 0.
inline DecayFit fit_decay(const std::vector<double>& alphas, const std::vector<double>& fracs) {
  require(alphas.size() == fracs.size(), "alpha and fraction counts differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (fracs[i] > 0.0) {
      xs.push_back(alphas[i]);
      ys.push_back(std::log(fracs[i]));
    }
  if (xs.size() < 3) throw InsufficientData("fewer than 3 nonzero level-set measures");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) { sx += xs[i]; sy += ys[i]; }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  DecayFit f;
  f.points = static_cast<int>(xs.size());
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  f.b = -slope;
  f.B = std::exp(my - slope * mx);
  f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

struct LevelSetFractions {
  double a_C0 = 0.0;
  std::vector<double> plus;   // |{(h - a)^+ > alpha} cap D0+| / |D0+|
  std::vector<double> minus;  // |{(a - h)^+ > alpha} cap D0-| / |D0-|
};

inline LevelSetFractions levelset_fractions(const LogField& lf, const Cube& root,
                                            const std::vector<double>& alphas) {
  const FieldPath& p = *lf.source;
  const CubeWeights cw = cube_weights(p.grid, root);
  LevelSetFractions out;
  out.a_C0 = detail::weighted_avg(p.grid, cw, lf.h.data() + detail::sample_near(p.axis, root.l) * p.nodes());
  const SubcubeSet sc = subcubes(root);
  const RegionIndex rp = region_index(p, sc.d_plus), rm = region_index(p, sc.d_minus);
  for (double a : alphas) {
    std::size_t cp = 0, cm = 0;
    for (std::size_t j = rp.j_first; j < rp.j_last; ++j)
      for (std::size_t k : rp.nodes)
        if (lf.at(j, k) - out.a_C0 > a) ++cp;
    for (std::size_t j = rm.j_first; j < rm.j_last; ++j)
      for (std::size_t k : rm.nodes)
        if (out.a_C0 - lf.at(j, k) > a) ++cm;
    out.plus.push_back(static_cast<double>(cp) / static_cast<double>(rp.pairs()));
    out.minus.push_back(static_cast<double>(cm) / static_cast<double>(rm.pairs()));
  }
  return out;
}

struct LevelSetDecay {
  LevelSetFractions fractions;
  DecayFit plus, minus;
};

inline LevelSetDecay levelset_decay(const LogField& lf, const CubeHierarchy& h,
                                    const std::vector<double>& alphas) {
  LevelSetDecay d;
  d.fractions = levelset_fractions(lf, h.root, alphas);
  d.plus = fit_decay(alphas, d.fractions.plus);
  d.minus = fit_decay(alphas, d.fractions.minus);
  return d;
}

// F[u + mu, nu]^{1/nu} on (D+, D-).
inline double F_root(const FieldPath& path, double mu, double nu, const SpaceTimeRect& Dplus,
                     const SpaceTimeRect& Dminus) {
  return std::pow(F_functional(path, nu, mu, Dplus, Dminus), 1.0 / nu);
}

struct ReverseCSRow {
  double mu;
  double eps;
  double K_hat;
};

struct ReverseCSTail {
  std::vector<ReverseCSRow> rows;
  std::vector<double> variation;  // per eps: (max - min) / min of K_hat over mu
  bool mu_stable = true;
};

// values[i][p] = F^{1/nu} of path p at mus[i].
inline ReverseCSTail reverse_cs_tail(const std::vector<double>& mus,
                                     const std::vector<std::vector<double>>& values,
                                     const std::vector<double>& eps_list = {0.1, 0.05, 0.01},
                                     double max_variation = 0.25) {
  require(mus.size() == values.size() && !mus.empty(), "one value list per mu");
  ReverseCSTail out;
  for (double e : eps_list) {
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < mus.size(); ++i) {
      const double K = percentile(values[i], 1.0 - e);
      out.rows.push_back({mus[i], e, K});
      lo = std::min(lo, K);
      hi = std::max(hi, K);
    }
    const double var = lo > 0 ? (hi - lo) / lo : kInf;
    out.variation.push_back(var);
    if (!(var < max_variation)) out.mu_stable = false;
  }
  return out;
}

}  // namespace harnack
