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
/* experiments.hpp - the headline experiments: Harnack tail curves,
 * positivity scans, the deterministic Moser ratio, the filter inclusion
 * checker, the heat benchmark and the weak-residual refinement study.
 */
#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ensemble.hpp"
#include "fields.hpp"
#include "solver.hpp"

namespace harnack {

// ---------------------------------------------------------------- Harnack

// P strictly after Q, Q strictly after 0, both inside [t0, T] x box.
inline void validate_harnack_geometry(const SpaceTimeRect& P, const SpaceTimeRect& Q,
                                      const Grid& g, double t0, double T) {
  if (P.dim() != g.n || Q.dim() != g.n)
    throw InvalidArgument("region dimension does not match the grid");
  if (!(Q.t_lo > 0.0))
    throw InvalidArgument("Q must lie strictly after time 0 (need Q.t_lo > 0)");
  if (!(P.t_lo > Q.t_hi))
    throw InvalidArgument("P must lie strictly after Q in time (need P.t_lo > Q.t_hi)");
  for (const SpaceTimeRect* r : {&P, &Q}) {
    const char* name = r == &P ? "P" : "Q";
    if (r->t_lo < t0 || r->t_hi > T + 1e-12)
      throw InvalidArgument(std::string(name) + " leaves the simulated time span");
    if (!ball_inside_box(g, r->ball))
      throw InvalidArgument(std::string(name) + " leaves the simulated box");
  }
}

struct HarnackSummary {
  double sup_Q = 0.0;
  double inf_P = 0.0;
};

inline HarnackSummary summarize_harnack(const FieldPath& path, const SpaceTimeRect& P,
                                        const SpaceTimeRect& Q) {
  return {sup_on(path, Q), inf_on(path, P)};
}

inline bool harnack_event(const HarnackSummary& s, double a, double gamma) {
  return s.sup_Q > a && gamma * s.inf_P <= a;
}

struct HarnackPoint {
  double gamma;
  TailEstimate est;
};

inline std::vector<HarnackPoint> harnack_curve(const Ensemble<HarnackSummary>& ens,
                                               double a, const std::vector<double>& gammas) {
  require(!gammas.empty(), "harnack curve needs at least one gamma");
  std::vector<HarnackPoint> out;
  for (double G : gammas) {
    require(G >= 0.0, "gamma must be nonnegative");
    out.push_back({G, joint_tail(
                          ens, [&](const HarnackSummary& s) { return s.sup_Q > a; },
                          [&](const HarnackSummary& s) { return G * s.inf_P <= a; })});
  }
  return out;
}

// Smallest gamma of the curve whose estimate drops below eps.
inline std::optional<double> gamma_below(const std::vector<HarnackPoint>& curve, double eps) {
  for (const HarnackPoint& p : curve)
    if (p.est.p_hat < eps) return p.gamma;
  return std::nullopt;
}

// Paths whose joint indicator is not monotone in gamma in the direction
// fixed by the sign of inf_P (nonincreasing when inf_P >= 0). Expected 0.
inline std::size_t indicator_monotone_violations(const Ensemble<HarnackSummary>& ens,
                                                 double a, std::vector<double> gammas) {
  std::sort(gammas.begin(), gammas.end());
  std::size_t bad = 0;
  ens.for_each([&](std::size_t, const HarnackSummary& s) {
    const bool up = s.inf_P < 0.0;
    for (std::size_t i = 1; i < gammas.size(); ++i) {
      const bool prev = harnack_event(s, a, gammas[i - 1]);
      const bool cur = harnack_event(s, a, gammas[i]);
      if (up ? (prev && !cur) : (!prev && cur)) {
        ++bad;
        return;
      }
    }
  });
  return bad;
}

inline std::vector<double> default_gammas() {
  std::vector<double> g;
  for (int i = 0; i <= 8; ++i) g.push_back(std::ldexp(1.0, i));
  return g;
}

// ------------------------------------------------------------- positivity

inline void validate_positive_initial(const FieldSnapshot& u0) {
  bool nonzero = false;
  for (std::size_t k = 0; k < u0.values.size(); ++k) {
    if (u0.values[k] < 0.0)
      throw InvalidArgument("initial condition is negative at node " + std::to_string(k));
    if (u0.values[k] > 0.0) nonzero = true;
  }
  if (!nonzero) throw InvalidArgument("initial condition vanishes identically");
}

struct PositivitySummary {
  double min_region = 0.0;
  double max_neg_energy = 0.0;  // max over steps of ||u^-||^2
  double initial_energy = 0.0;  // ||u0||^2
  std::size_t negative = 0;     // (step, node) pairs with u < -10 tol
  std::size_t total = 0;
};

inline PositivitySummary summarize_positivity(const FieldPath& path, const SpaceTimeRect& region,
                                              double solver_tol) {
  PositivitySummary s;
  s.min_region = inf_on(path, region);
  const std::size_t N = path.nodes();
  s.initial_energy = l2_energy({path.snap(0), N}, path.grid);
  for (std::size_t j = 0; j < path.samples(); ++j) {
    const double* u = path.snap(j);
    s.max_neg_energy = std::max(s.max_neg_energy, neg_part_energy({u, N}, path.grid));
    for (std::size_t k = 0; k < N; ++k)
      if (u[k] < -10.0 * solver_tol) ++s.negative;
  }
  s.total = path.samples() * N;
  return s;
}

struct PositivityReport {
  std::size_t paths = 0;
  std::size_t at_or_below_floor = 0;
  double min_of_mins = kInf;
  double max_neg_energy = 0.0;
  double initial_energy = 0.0;   // max over paths
  double negative_fraction = 0.0;
};

inline PositivityReport positivity_report(const Ensemble<PositivitySummary>& ens, double floor) {
  require(floor >= 0.0, "positivity floor must be nonnegative");
  PositivityReport r;
  std::size_t neg = 0, tot = 0;
  ens.for_each([&](std::size_t, const PositivitySummary& s) {
    ++r.paths;
    if (s.min_region <= floor) ++r.at_or_below_floor;
    r.min_of_mins = std::min(r.min_of_mins, s.min_region);
    r.max_neg_energy = std::max(r.max_neg_energy, s.max_neg_energy);
    r.initial_energy = std::max(r.initial_energy, s.initial_energy);
    neg += s.negative;
    tot += s.total;
  });
  if (r.paths == 0) throw EmptyEnsemble("no successful paths in the ensemble");
  r.negative_fraction = static_cast<double>(neg) / static_cast<double>(tot);
  return r;
}

// ------------------------------------------------------------------ Moser

struct MoserResult {
  double ratio = 0.0;
  double sup_Q = 0.0;
  double inf_P = 0.0;
  std::string diagnostic;
};

inline MoserResult moser_ratio(const FieldPath& path, const CoefficientModel& cm,
                               const SpaceTimeRect& P, const SpaceTimeRect& Q) {
  require(cm.deterministic(), "moser ratio needs g = 0");
  require(!cm.separable || (cm.reaction_scale == 0.0 && cm.f0 == 0.0), "moser ratio needs f = 0");
  validate_harnack_geometry(P, Q, path.grid, path.axis.t0, path.axis.horizon());
  MoserResult r;
  r.sup_Q = sup_on(path, Q);
  r.inf_P = inf_on(path, P);
  require(r.sup_Q > 0.0, "moser ratio needs a nontrivial nonnegative solution");
  if (r.inf_P <= 0.0) {
    r.ratio = kInf;
    r.diagnostic = "inf over P is not positive";
  } else {
    r.ratio = r.sup_Q / r.inf_P;
  }
  return r;
}

// ----------------------------------------------------------- filter lemma

struct FilterTriple {
  double X, Y, Z;
};

struct FilterReport {
  std::size_t samples = 0;
  std::size_t in_left = 0;
  std::size_t violations = 0;
};

// Counts samples in {X + Z > b, YN + Z <= b} but not in
// {X > KNb / (KN + 1), YN <= b}. Requires Y >= K Z >= 0.
inline FilterReport filter_lemma_check(const std::vector<FilterTriple>& s, double K, double N,
                                       double b) {
  require(K > 0.0 && N > 0.0 && b > 0.0, "filter check needs K, N, b > 0");
  for (std::size_t i = 0; i < s.size(); ++i)
    if (!(s[i].Z >= 0.0 && s[i].Y >= K * s[i].Z))
      throw InvalidArgument("sample " + std::to_string(i) + " violates Y >= K Z >= 0");
  FilterReport r;
  r.samples = s.size();
  const double thr = K * N * b / (K * N + 1.0);
  for (const FilterTriple& t : s) {
    if (!(t.X + t.Z > b && t.Y * N + t.Z <= b)) continue;
    ++r.in_left;
    if (!(t.X > thr && t.Y * N <= b)) ++r.violations;
  }
  return r;
}

// ------------------------------------------------------- heat benchmark

// Exact solution of u_t = kappa Laplacian u from a periodized Gaussian of
// width w: the width grows to sqrt(w^2 + 2 kappa t) and mass is kept.
inline double heat_exact(const Point& x, const Point& c, double w, double t, double X,
                         double kappa = 1.0) {
  const double wt = std::sqrt(w * w + 2.0 * kappa * t);
  return std::pow(w / wt, x.dim) * periodic_gaussian(x, c, wt, X);
}

struct HeatRow {
  int N;
  double dx, dt, error, ratio;
};

// Discrete L^2 error at T of the semi-implicit heat solve against the
// closed form. dt = dt_factor dx^2 unless dt_fixed > 0.
inline HeatRow heat_error(int n, int N, double T, double w, double dt_factor,
                          double dt_fixed = 0.0, Scheme scheme = Scheme::SemiImplicit) {
  const Grid g(n, N);
  ModelSpec ms;
  ms.g_kind = "zero";
  ms.m = 0;
  ms.lambda_g = 0.0;
  const CoefficientModel cm = make_model(ms, n, g.X);
  SolverConfig cfg;
  cfg.dt = dt_fixed > 0.0 ? dt_fixed : dt_factor * g.dx() * g.dx();
  cfg.scheme = scheme;
  cfg.record_noise = false;
  const Point c = Point::origin(n);
  const FieldSnapshot u0 = FieldSnapshot::from_function(
      g, 0.0, [&](const Point& x) { return periodic_gaussian(x, c, w, g.X); });
  const std::size_t M = step_count(T, cfg.dt);
  std::vector<double> last;
  integrate(u0, cm, cfg, M, nullptr, [&](std::size_t j, double, const double* u) {
    if (j == M) last.assign(u, u + g.size());
  });
  double e = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d = last[k] - heat_exact(g.point(k), c, w, T, g.X);
    e += d * d;
  }
  return {N, g.dx(), cfg.dt, std::sqrt(e * g.cell_volume()), 0.0};
}

inline std::vector<HeatRow> heat_benchmark(const std::vector<int>& Ns, double T = 0.25,
                                           double w = 0.25, double dt_factor = 0.5) {
  std::vector<HeatRow> rows;
  for (int N : Ns) {
    rows.push_back(heat_error(1, N, T, w, dt_factor));
    if (rows.size() > 1) rows.back().ratio = rows[rows.size() - 2].error / rows.back().error;
  }
  return rows;
}

// ------------------------------------------- weak residual refinement

struct ResidualRow {
  double dt;
  double residual;  // mean over paths
  double ratio;     // previous / this
};

// Residual on [s, t] for dt, dt/2, ..., dt/2^{levels-1}. The Brownian path
// is drawn once at the finest step and summed for coarser ones, so every
// level sees the same noise.
inline std::vector<ResidualRow> residual_refinement(const FieldSnapshot& u0,
                                                    const CoefficientModel& cm,
                                                    SolverConfig cfg, double T,
                                                    const TestFunction& phi, double s,
                                                    double t, int levels, std::size_t paths,
                                                    std::uint64_t master_seed) {
  require(levels >= 2 && paths >= 1, "refinement needs two levels and one path");
  const double dt0 = cfg.dt;
  const std::size_t fine_factor = std::size_t{1} << (levels - 1);
  const double dt_fine = dt0 / static_cast<double>(fine_factor);
  const std::size_t Mf = step_count(T, dt_fine);
  std::vector<double> acc(levels, 0.0);
  cfg.record_noise = true;
  for (std::size_t p = 0; p < paths; ++p) {
    const std::vector<double> fine =
        cm.m > 0 ? brownian_increments(path_seed(master_seed, p), Mf, cm.m, dt_fine)
                 : std::vector<double>{};
    for (int L = 0; L < levels; ++L) {
      cfg.dt = dt0 / static_cast<double>(std::size_t{1} << L);
      const std::size_t factor = fine_factor >> L;
      std::vector<double> dW = cm.m > 0 ? coarsen_increments(fine, cm.m, factor)
                                        : std::vector<double>{};
      const FieldPath path = solve_path_with_increments(u0, cm, cfg, T, std::move(dW));
      acc[L] += weak_residual(path, cm, phi, s, t);
    }
  }
  std::vector<ResidualRow> rows;
  for (int L = 0; L < levels; ++L) {
    const double r = acc[L] / static_cast<double>(paths);
    const double ratio = L > 0 ? rows.back().residual / r : 0.0;
    rows.push_back({dt0 / static_cast<double>(std::size_t{1} << L), r, ratio});
  }
  return rows;
}

}  // namespace harnack
