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
/* oracles.hpp - independent reference computations shared by the unit
 * tests and the acceptance binary. Nothing here calls the routine it is
 * meant to check; each oracle is a direct loop over the definition.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "harnack/harnack.hpp"

namespace oracle {

using namespace harnack;

// Smooth random nonnegative field: a few space-time modes plus a floor,
// with an occasional exact-zero patch so truncations see both regimes.
inline FieldPath random_field(std::uint64_t seed, const Grid& g, const TimeAxis& a,
                              double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int modes = 3 + static_cast<int>(U(rng) * 3);
  std::vector<double> c(modes), kt(modes), kx(modes), ky(modes), ph(modes);
  for (int i = 0; i < modes; ++i) {
    c[i] = U(rng);
    kt[i] = 6.0 * U(rng);
    kx[i] = 1.0 + std::floor(4.0 * U(rng));
    ky[i] = std::floor(3.0 * U(rng));
    ph[i] = 6.283185307179586 * U(rng);
  }
  const double floor = U(rng) < 0.3 ? -0.2 : 0.05 * U(rng);
  return FieldPath::from_function(g, a, [&](double t, const Point& x) {
    double s = 0.0;
    for (int i = 0; i < modes; ++i) {
      double arg = kt[i] * t + kx[i] * 1.5707963267948966 * x[0] + ph[i];
      if (x.dim == 2) arg += ky[i] * 1.5707963267948966 * x[1];
      s += c[i] * (1.0 + std::sin(arg));
    }
    return scale * std::max(s / modes + floor, 0.0);
  });
}

// Direct membership in (t_lo, t_hi] x open max-norm ball.
inline bool in_rect(double t, const Point& x, double t_lo, double t_hi, const Point& c,
                    double r) {
  if (!(t > t_lo && t <= t_hi)) return false;
  for (int d = 0; d < x.dim; ++d)
    if (!(std::abs(x[d] - c[d]) < r)) return false;
  return true;
}

struct CoverCheck {
  std::size_t points = 0;
  std::size_t uncovered = 0;
};

// Every point of a space-time lattice inside Q_{theta R}(1, 0) must lie in
// some Q_rho(t_i, x_i), rho = (1 - theta) R / 2. Centers are bucketed by
// apex time only to keep the loop affordable; membership is brute force.
inline CoverCheck check_cover(const std::vector<CoverCenter>& centers, double theta, double R,
                              int n, int nt, int nx) {
  const double span = theta * R, rho = (1.0 - theta) * R / 2.0;
  std::map<double, std::vector<Point>> by_time;
  for (const CoverCenter& c : centers) by_time[c.t].push_back(c.x);
  CoverCheck out;
  const double t_lo = 1.0 - span * span;
  auto covered = [&](double t, const Point& x) {
    for (const auto& [tc, xs] : by_time) {
      if (!(t > tc - rho * rho && t <= tc)) continue;
      for (const Point& xc : xs)
        if (in_rect(t, x, tc - rho * rho, tc, xc, rho)) return true;
    }
    return false;
  };
  for (int it = 0; it < nt; ++it) {
    // include the apex and points just above the open bottom
    const double t = it == 0 ? t_lo + 1e-12 : t_lo + (1.0 - t_lo) * it / (nt - 1.0);
    for (int a = 0; a < nx; ++a) {
      const double xa = -span + 2.0 * span * (a + 0.5) / nx;
      if (n == 1) {
        ++out.points;
        if (!covered(t, Point{xa})) ++out.uncovered;
        continue;
      }
      for (int b = 0; b < nx; ++b) {
        const double xb = -span + 2.0 * span * (b + 0.5) / nx;
        ++out.points;
        if (!covered(t, Point{xa, xb})) ++out.uncovered;
      }
    }
    // edge points just inside the open ball
    const double e = span * (1.0 - 1e-9);
    for (double xa : {-e, e}) {
      ++out.points;
      const Point x = n == 1 ? Point{xa} : Point{xa, e};
      if (!covered(t, x)) ++out.uncovered;
    }
  }
  return out;
}

// x_j from x_{j-1} by the level-count recurrence with pieces = zeta^{n+2}.
inline std::vector<double> cube_recurrence(int n, int depth, int zeta = 4) {
  const double pieces = std::pow(zeta, n + 2);
  std::vector<double> x{1.0};
  for (int j = 1; j <= depth; ++j)
    x.push_back(2.0 * pieces * x.back() + std::pow(2.0, j) * std::pow(pieces, j));
  return x;
}

// Unclamped node set and region sum, the p = q = 2 norm written out.
inline double l22_norm(const FieldPath& p, const SpaceTimeRect& r) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.samples(); ++j) {
    const double t = p.time(j);
    for (std::size_t k = 0; k < p.nodes(); ++k)
      if (in_rect(t, p.grid.point(k), r.t_lo, r.t_hi, r.ball.center, r.ball.radius))
        s += p.at(j, k) * p.at(j, k);
  }
  return std::sqrt(s * p.grid.cell_volume() * p.axis.dt);
}

// Wilson score interval written from the textbook formula.
inline std::pair<double, double> wilson_interval(double k, double n, double z) {
  const double p = k / n;
  const double c = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double h = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  return {std::max(0.0, c - h), std::min(1.0, c + h)};
}

// Default stochastic model of the lab for a given grid.
inline CoefficientModel default_model(int n = 1, double X = 2.0) {
  return make_model(ModelSpec{}, n, X);
}

inline CoefficientModel heat_model(int n = 1, double X = 2.0) {
  ModelSpec ms;
  ms.g_kind = "zero";
  ms.lambda_g = 0.0;
  ms.m = 0;
  return make_model(ms, n, X);
}

}  // namespace oracle
