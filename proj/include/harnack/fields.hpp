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
/* fields.hpp - sampled space-time fields and the functionals evaluated on
 * them: mixed L^{p,q} norms, sup/inf, the F product, rescaling,
 * interpolation checks and the negative-part energy.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <tuple>
#include <vector>

#include "geometry.hpp"
#include "grid.hpp"

namespace harnack {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct FieldSnapshot {
  Grid grid;
  double t = 0.0;
  std::vector<double> values;

  FieldSnapshot() = default;
  FieldSnapshot(Grid g, double t_, std::vector<double> v)
      : grid(g), t(t_), values(std::move(v)) {
    require(values.size() == grid.size(), "snapshot size does not match grid");
    for (double x : values)
      if (!std::isfinite(x)) throw InvalidArgument("snapshot value is not finite");
  }

  template <class F>
  static FieldSnapshot from_function(const Grid& g, double t, F&& f) {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(g.point(k));
    return FieldSnapshot(g, t, std::move(v));
  }
};

// One realization: snapshots at t_0..t_M and the M x m increments that
// produced them. Layout is contiguous, snapshot-major.
struct FieldPath {
  Grid grid;
  TimeAxis axis;
  int m = 0;
  std::uint64_t seed = 0;
  bool has_noise = false;
  std::vector<double> u;
  std::vector<double> dW;

  FieldPath() = default;
  FieldPath(Grid g, TimeAxis a, int m_)
      : grid(g), axis(a), m(m_), u((a.steps + 1) * g.size(), 0.0) {}

  std::size_t samples() const { return axis.steps + 1; }
  std::size_t nodes() const { return grid.size(); }
  double time(std::size_t j) const { return axis.time(j); }

  double* snap(std::size_t j) { return u.data() + j * nodes(); }
  const double* snap(std::size_t j) const { return u.data() + j * nodes(); }
  double at(std::size_t j, std::size_t k) const { return u[j * nodes() + k]; }
  const double* increments(std::size_t j) const {
    return dW.data() + j * static_cast<std::size_t>(m);
  }

  FieldSnapshot snapshot(std::size_t j) const {
    return FieldSnapshot(grid, time(j),
                         std::vector<double>(snap(j), snap(j) + nodes()));
  }

  void require_noise() const {
    if (!has_noise || dW.size() != axis.steps * static_cast<std::size_t>(m))
      throw StateError("path has no recorded noise increments");
  }

  template <class F>
  static FieldPath from_function(const Grid& g, const TimeAxis& a, F&& f) {
    FieldPath p(g, a, 0);
    for (std::size_t j = 0; j < p.samples(); ++j)
      for (std::size_t k = 0; k < p.nodes(); ++k)
        p.u[j * p.nodes() + k] = f(a.time(j), g.point(k));
    return p;
  }
};

// The (sample, node) pairs of a rectangle: nodes whose centers lie in the
// ball and samples whose left endpoints lie in (t_lo, t_hi].
struct RegionIndex {
  std::size_t j_first = 0, j_last = 0;
  std::vector<std::size_t> nodes;
  bool empty() const { return j_last <= j_first || nodes.empty(); }
  std::size_t pairs() const { return (j_last - j_first) * nodes.size(); }
};

inline RegionIndex region_index(const Grid& g, const TimeAxis& a,
                                const SpaceTimeRect& rect) {
  require(rect.dim() == g.n, "region dimension does not match grid");
  const double tol = 1e-9 * a.dt;
  if (rect.t_lo < a.t0 - tol || rect.t_hi > a.horizon() + tol)
    throw InvalidArgument("region extends past the path time span");
  RegionIndex r;
  r.nodes = ball_nodes(g, rect.ball);
  std::tie(r.j_first, r.j_last) = a.half_open(rect.t_lo, rect.t_hi);
  if (r.empty()) throw EmptyRegion("region contains no (node, step) pair");
  return r;
}

inline RegionIndex region_index(const FieldPath& p, const SpaceTimeRect& rect) {
  return region_index(p.grid, p.axis, rect);
}

struct MixedNormSpec {
  double p = 2.0;
  double q = 2.0;
};

// ||v||_{p,q} over the region for any accessor v(j, k). Inner integral is a
// node Riemann sum, outer one a left-point sum in time. p,q < 1 give the
// quasi-norm by the same formula.
template <class V>
double lpq_norm_of(const Grid& g, const TimeAxis& a, const RegionIndex& r,
                   MixedNormSpec s, V&& v) {
  require(s.p > 0.0 && s.q > 0.0, "norm exponents must be positive");
  const double cell = g.cell_volume();
  double outer = 0.0;
  for (std::size_t j = r.j_first; j < r.j_last; ++j) {
    double inner = 0.0;
    if (std::isinf(s.q)) {
      for (std::size_t k : r.nodes) inner = std::max(inner, std::abs(v(j, k)));
    } else {
      for (std::size_t k : r.nodes) inner += std::pow(std::abs(v(j, k)), s.q);
      inner = std::pow(cell * inner, 1.0 / s.q);
    }
    if (std::isinf(s.p))
      outer = std::max(outer, inner);
    else
      outer += std::pow(inner, s.p);
  }
  return std::isinf(s.p) ? outer : std::pow(a.dt * outer, 1.0 / s.p);
}

inline double lpq_norm(const FieldPath& path, MixedNormSpec s,
                       const SpaceTimeRect& rect) {
  const RegionIndex r = region_index(path, rect);
  return lpq_norm_of(path.grid, path.axis, r, s,
                     [&](std::size_t j, std::size_t k) { return path.at(j, k); });
}

inline double sup_on(const FieldPath& path, const SpaceTimeRect& rect) {
  const RegionIndex r = region_index(path, rect);
  double s = -kInf;
  for (std::size_t j = r.j_first; j < r.j_last; ++j)
    for (std::size_t k : r.nodes) s = std::max(s, path.at(j, k));
  return s;
}

inline double inf_on(const FieldPath& path, const SpaceTimeRect& rect) {
  const RegionIndex r = region_index(path, rect);
  double s = kInf;
  for (std::size_t j = r.j_first; j < r.j_last; ++j)
    for (std::size_t k : r.nodes) s = std::min(s, path.at(j, k));
  return s;
}

// Region integral of phi(u(j,k)) with weight dt dx^n.
template <class Phi>
double region_integral(const FieldPath& path, const RegionIndex& r, Phi&& phi) {
  double acc = 0.0;
  for (std::size_t j = r.j_first; j < r.j_last; ++j) {
    const double* s = path.snap(j);
    for (std::size_t k : r.nodes) acc += phi(s[k]);
  }
  return acc * path.axis.dt * path.grid.cell_volume();
}

// (int_{D1} v^{-alpha}) (int_{D2} v^{alpha}), v = u + mu.
inline double F_functional(const FieldPath& path, double alpha, double mu,
                           const SpaceTimeRect& D1, const SpaceTimeRect& D2) {
  require(alpha > 0.0, "F functional needs alpha > 0");
  require(mu >= 0.0, "F functional needs mu >= 0");
  auto checked = [&](double u) {
    const double v = u + mu;
    if (!(v > 0.0))
      throw DomainError("u + mu is not positive inside the F functional regions");
    return v;
  };
  const double a = region_integral(path, region_index(path, D1), [&](double u) {
    return std::pow(checked(u), -alpha);
  });
  const double b = region_integral(path, region_index(path, D2), [&](double u) {
    return std::pow(checked(u), alpha);
  });
  return a * b;
}

// u_r(t, x) = u(r^2 t, r x), sampled by nearest node and nearest sample on
// the source's own grid and time axis.
inline FieldPath rescale(const FieldPath& path, double r) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidArgument("rescale needs r in (0, 1]");
  FieldPath out(path.grid, path.axis, 0);
  out.seed = path.seed;
  const Grid& g = path.grid;
  std::vector<std::size_t> src(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const Point x = g.point(k);
    const int i0 = g.nearest(r * x[0]);
    const int i1 = g.n == 2 ? g.nearest(r * x[1]) : 0;
    src[k] = g.index(i0, i1);
  }
  const TimeAxis& a = path.axis;
  for (std::size_t j = 0; j < out.samples(); ++j) {
    const double ts = r * r * (a.time(j) - a.t0);
    const auto js = static_cast<std::size_t>(std::llround(ts / a.dt));
    if (js > a.steps) throw InvalidArgument("rescaled time leaves the path");
    const double* s = path.snap(js);
    double* d = out.snap(j);
    for (std::size_t k = 0; k < g.size(); ++k) d[k] = s[src[k]];
  }
  return out;
}

struct InterpolationReport {
  double lhs = 0.0;       // ||u||_{alpha,q} (time form) or ||u||_{p,alpha}
  double log_convex = 0.0;  // first right side, the Hoelder interpolant
  double young = 0.0;     // eps ||u||_{inf,q} + C eps^-gamma ||u||_{beta,q}
  double rhs = 0.0;       // final form with the sup norm
  double C = 0.0;         // Young constant beta / alpha
  double gamma = 0.0;     // alpha / beta - 1
  double slack = 0.0;     // min over the three inequalities, scaled
  bool ok = true;
};

namespace detail {

inline void finish_interpolation(InterpolationReport& r, double tol) {
  const double scale = std::max({r.lhs, r.rhs, 1e-300});
  const double s1 = r.log_convex - r.lhs;
  const double s2 = r.young - r.log_convex;
  const double s3 = r.rhs - r.young;
  r.slack = std::min({s1, s2, s3}) / scale;
  r.ok = r.slack >= -tol;
}

inline double youngs_split(double big, double small, double eps,
                           const InterpolationReport& r) {
  return eps * big + r.C * std::pow(eps, -r.gamma) * small;
}

}  // namespace detail

// Time interpolation:
//   ||u||_{a,q} <= ||u||_{inf,q}^{1-b/a} ||u||_{b,q}^{b/a}
//              <= eps ||u||_{inf,q} + C eps^{-g} ||u||_{b,q}
//              <= eps V^{1/q} l^{n/q} ||u||_inf + C eps^{-g} ||u||_{b,q}
// with V = 2^n the max-norm volume of B_1 and l the ball radius.
// Weighted Young gives C = b/a and a coefficient 1 - b/a <= 1 on eps.
inline InterpolationReport interpolation_check(const FieldPath& path,
                                               double alpha, double beta,
                                               double q,
                                               const SpaceTimeRect& rect,
                                               double eps, double tol = 1e-9) {
  require(beta > alpha / 2.0 && beta < alpha,
          "interpolation needs alpha/2 < beta < alpha");
  require(eps > 0.0 && q > 0.0, "interpolation needs eps > 0 and q > 0");
  const RegionIndex ri = region_index(path, rect);
  auto v = [&](std::size_t j, std::size_t k) { return path.at(j, k); };
  InterpolationReport r;
  r.C = beta / alpha;
  r.gamma = alpha / beta - 1.0;
  const double na = lpq_norm_of(path.grid, path.axis, ri, {alpha, q}, v);
  const double nb = lpq_norm_of(path.grid, path.axis, ri, {beta, q}, v);
  const double ninf = lpq_norm_of(path.grid, path.axis, ri, {kInf, q}, v);
  const double sup = lpq_norm_of(path.grid, path.axis, ri, {kInf, kInf}, v);
  const double V = std::pow(2.0, path.grid.n);
  r.lhs = na;
  r.log_convex = std::pow(ninf, 1.0 - beta / alpha) * std::pow(nb, beta / alpha);
  r.young = detail::youngs_split(ninf, nb, eps, r);
  r.rhs = detail::youngs_split(
      std::pow(V, 1.0 / q) * std::pow(rect.ball.radius, path.grid.n / q) * sup,
      nb, eps, r);
  detail::finish_interpolation(r, tol);
  return r;
}

// Space interpolation, the same chain with the spatial exponent moving:
//   ||u||_{p,a} <= ||u||_{p,inf}^{1-b/a} ||u||_{p,b}^{b/a}
//              <= eps ||u||_{p,inf} + C eps^{-g} ||u||_{p,b}
//              <= eps |I|^{1/p} ||u||_inf + C eps^{-g} ||u||_{p,b}
inline InterpolationReport interpolation_space_check(
    const FieldPath& path, double p, double alpha, double beta,
    const SpaceTimeRect& rect, double eps, double tol = 1e-9) {
  require(beta > alpha / 2.0 && beta < alpha,
          "interpolation needs alpha/2 < beta < alpha");
  require(eps > 0.0 && p > 0.0, "interpolation needs eps > 0 and p > 0");
  const RegionIndex ri = region_index(path, rect);
  auto v = [&](std::size_t j, std::size_t k) { return path.at(j, k); };
  InterpolationReport r;
  r.C = beta / alpha;
  r.gamma = alpha / beta - 1.0;
  const double na = lpq_norm_of(path.grid, path.axis, ri, {p, alpha}, v);
  const double nb = lpq_norm_of(path.grid, path.axis, ri, {p, beta}, v);
  const double ninf = lpq_norm_of(path.grid, path.axis, ri, {p, kInf}, v);
  const double sup = lpq_norm_of(path.grid, path.axis, ri, {kInf, kInf}, v);
  r.lhs = na;
  r.log_convex = std::pow(ninf, 1.0 - beta / alpha) * std::pow(nb, beta / alpha);
  r.young = detail::youngs_split(ninf, nb, eps, r);
  r.rhs = detail::youngs_split(std::pow(rect.duration(), 1.0 / p) * sup, nb,
                               eps, r);
  detail::finish_interpolation(r, tol);
  return r;
}

inline double neg_part_energy(std::span<const double> values, const Grid& g) {
  double s = 0.0;
  for (double v : values)
    if (v < 0.0) s += v * v;
  return s * g.cell_volume();
}

inline double neg_part_energy(const FieldSnapshot& snap) {
  return neg_part_energy(snap.values, snap.grid);
}

inline double l2_energy(std::span<const double> values, const Grid& g) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return s * g.cell_volume();
}

}  // namespace harnack
