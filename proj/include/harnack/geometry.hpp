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
/* geometry.hpp - max-norm balls, space-time rectangles, parabolic cylinders
 * and the lattice covering of Q_{theta R} by small cylinders.
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <string>
#include <vector>

#include "error.hpp"

namespace harnack {

constexpr int kMaxDim = 2;

struct Point {
  int dim = 1;
  std::array<double, kMaxDim> c{0.0, 0.0};

  Point() = default;
  explicit Point(int n) : dim(n) {
    require(n >= 1 && n <= kMaxDim, "dimension must be 1 or 2");
  }
  Point(std::initializer_list<double> v) : dim(static_cast<int>(v.size())) {
    require(dim >= 1 && dim <= kMaxDim, "dimension must be 1 or 2");
    std::copy(v.begin(), v.end(), c.begin());
  }
  static Point origin(int n) { return Point(n); }

  double operator[](int i) const { return c[i]; }
  double& operator[](int i) { return c[i]; }
  bool operator==(const Point&) const = default;
};

// |x|_inf, the only norm used for balls.
inline double max_dist(const Point& a, const Point& b) {
  require(a.dim == b.dim, "point dimension mismatch");
  double d = 0.0;
  for (int i = 0; i < a.dim; ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct Ball {
  Point center;
  double radius = 1.0;

  Ball() = default;
  Ball(Point c, double r) : center(c), radius(r) {
    require(r > 0.0 && std::isfinite(r), "ball radius must be positive");
  }
  int dim() const { return center.dim; }
  bool contains(const Point& x) const { return max_dist(x, center) < radius; }
  bool operator==(const Ball&) const = default;
};

// (t_lo, t_hi] x ball
struct SpaceTimeRect {
  double t_lo = 0.0, t_hi = 1.0;
  Ball ball;

  SpaceTimeRect() = default;
  SpaceTimeRect(double lo, double hi, Ball b) : t_lo(lo), t_hi(hi), ball(b) {
    require(lo < hi, "rectangle needs t_lo < t_hi");
  }
  int dim() const { return ball.dim(); }
  double duration() const { return t_hi - t_lo; }
  bool operator==(const SpaceTimeRect&) const = default;
};

struct ParabolicCylinder {
  double t0 = 1.0;
  Point x0;
  double r = 1.0;
};

inline SpaceTimeRect make_cylinder(double t0, const Point& x0, double r) {
  require(r > 0.0 && std::isfinite(r), "cylinder radius must be positive");
  return SpaceTimeRect(t0 - r * r, t0, Ball(x0, r));
}

inline SpaceTimeRect make_cylinder(const ParabolicCylinder& q) {
  return make_cylinder(q.t0, q.x0, q.r);
}

// Q_r with the default base point (1, 0).
inline SpaceTimeRect make_cylinder(double r, int n) {
  return make_cylinder(1.0, Point::origin(n), r);
}

inline bool contains(const SpaceTimeRect& rect, double t, const Point& x) {
  return t > rect.t_lo && t <= rect.t_hi && rect.ball.contains(x);
}

inline double volume(const SpaceTimeRect& rect) {
  return rect.duration() * std::pow(2.0 * rect.ball.radius, rect.dim());
}

// a is inside b (closures compared, which is what nesting needs).
inline bool rect_within(const SpaceTimeRect& a, const SpaceTimeRect& b,
                        double tol = 1e-12) {
  if (a.dim() != b.dim()) return false;
  if (a.t_lo < b.t_lo - tol || a.t_hi > b.t_hi + tol) return false;
  return max_dist(a.ball.center, b.ball.center) + a.ball.radius <=
         b.ball.radius + tol;
}

struct CoverCenter {
  double t;
  Point x;
};

// Lattice constant: count * (1-theta)^{n+2} < 4^{n+1} on (1/2, 1), and the
// supremum is approached as theta -> 1, so no smaller constant works.
inline double covering_constant(int n) { return std::pow(4.0, n + 1); }

inline std::size_t covering_bound(double theta, int n) {
  return static_cast<std::size_t>(
      std::ceil(covering_constant(n) * std::pow(1.0 - theta, -(n + 2))));
}

// Centers (t_i, x_i) in Q_{theta R} whose cylinders Q_{(1-theta)R/2} cover it.
// Time: apexes 1 - k rho^2, spacing rho^2. Space: spacing h <= rho.
inline std::vector<CoverCenter> cover_cylinder(double theta, double R, int n) {
  if (!(theta > 0.5 && theta < 1.0))
    throw InvalidArgument("cover_cylinder needs 1/2 < theta < 1");
  require(R > 0.0 && R <= 1.0, "cover_cylinder needs 0 < R <= 1");
  require(n >= 1 && n <= kMaxDim, "dimension must be 1 or 2");

  const double rho = (1.0 - theta) * R / 2.0;
  const double span = theta * R;
  const auto K = static_cast<int>(std::ceil(span * span / (rho * rho) - 1e-12));
  const auto P = static_cast<int>(std::ceil(2.0 * span / rho - 1e-12));
  const double h = 2.0 * span / P;

  std::vector<double> axis(P);
  for (int k = 0; k < P; ++k) axis[k] = -span + (k + 0.5) * h;

  std::vector<CoverCenter> out;
  out.reserve(static_cast<std::size_t>(K) * (n == 1 ? P : P * P));
  for (int k = 0; k < K; ++k) {
    const double t = 1.0 - k * rho * rho;
    if (n == 1) {
      for (int a = 0; a < P; ++a) out.push_back({t, Point{axis[a]}});
    } else {
      for (int a = 0; a < P; ++a)
        for (int b = 0; b < P; ++b) out.push_back({t, Point{axis[a], axis[b]}});
    }
  }
  return out;
}

}  // namespace harnack
