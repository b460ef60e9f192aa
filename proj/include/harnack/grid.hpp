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
/* grid.hpp - cell-centered periodic lattice on [-X, X)^n */
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "geometry.hpp"

namespace harnack {

// Node i sits at -X + (i + 1/2) dx, so balls whose center and radius are
// multiples of dx/2 pick up exactly (2r)^n of discrete measure.
struct Grid {
  int n = 1;
  int N = 128;       // nodes per dimension
  double X = 2.0;    // half width

  Grid() = default;
  Grid(int n_, int N_, double X_ = 2.0) : n(n_), N(N_), X(X_) {
    require(n >= 1 && n <= kMaxDim, "grid dimension must be 1 or 2");
    require(N >= 4, "grid needs at least 4 nodes per dimension");
    require(X > 0.0, "grid half width must be positive");
  }

  double dx() const { return 2.0 * X / N; }
  double cell_volume() const { return std::pow(dx(), n); }
  std::size_t size() const {
    return n == 1 ? static_cast<std::size_t>(N)
                  : static_cast<std::size_t>(N) * static_cast<std::size_t>(N);
  }
  double coord(int i) const { return -X + (i + 0.5) * dx(); }
  int wrap(int i) const { return ((i % N) + N) % N; }

  std::size_t index(int i0, int i1 = 0) const {
    return static_cast<std::size_t>(i0) +
           static_cast<std::size_t>(N) * static_cast<std::size_t>(i1);
  }
  Point point(std::size_t k) const {
    Point p(n);
    p[0] = coord(static_cast<int>(k % N));
    if (n == 2) p[1] = coord(static_cast<int>(k / N));
    return p;
  }
  int nearest(double x) const {
    return wrap(static_cast<int>(std::lround((x + X) / dx() - 0.5)));
  }

  bool operator==(const Grid&) const = default;
};

// Per-axis node ranges [lo, hi) of a ball; the ball must sit inside the box.
struct NodeBox {
  int lo[kMaxDim] = {0, 0};
  int hi[kMaxDim] = {0, 0};
  int n = 1;
  bool empty() const {
    for (int d = 0; d < n; ++d)
      if (hi[d] <= lo[d]) return true;
    return false;
  }
  std::size_t count() const {
    if (empty()) return 0;
    std::size_t c = 1;
    for (int d = 0; d < n; ++d) c *= static_cast<std::size_t>(hi[d] - lo[d]);
    return c;
  }
};

inline bool ball_inside_box(const Grid& g, const Ball& b) {
  if (b.dim() != g.n) return false;
  for (int d = 0; d < g.n; ++d)
    if (b.center[d] - b.radius < -g.X - 1e-12 ||
        b.center[d] + b.radius > g.X + 1e-12)
      return false;
  return true;
}

inline NodeBox node_box(const Grid& g, const Ball& b) {
  require(b.dim() == g.n, "ball dimension does not match grid");
  if (!ball_inside_box(g, b))
    throw InvalidArgument("ball exceeds the periodic box");
  NodeBox nb;
  nb.n = g.n;
  for (int d = 0; d < g.n; ++d) {
    int lo = g.N, hi = 0;
    for (int i = 0; i < g.N; ++i) {
      if (std::abs(g.coord(i) - b.center[d]) < b.radius) {
        lo = std::min(lo, i);
        hi = std::max(hi, i + 1);
      }
    }
    nb.lo[d] = lo;
    nb.hi[d] = hi;
  }
  return nb;
}

// Flat node indices of a ball.
inline std::vector<std::size_t> ball_nodes(const Grid& g, const Ball& b) {
  const NodeBox nb = node_box(g, b);
  std::vector<std::size_t> out;
  if (nb.empty()) return out;
  out.reserve(nb.count());
  if (g.n == 1) {
    for (int i = nb.lo[0]; i < nb.hi[0]; ++i) out.push_back(g.index(i));
  } else {
    for (int j = nb.lo[1]; j < nb.hi[1]; ++j)
      for (int i = nb.lo[0]; i < nb.hi[0]; ++i) out.push_back(g.index(i, j));
  }
  return out;
}

// Uniform time samples t_j = t0 + j dt; sample j carries weight dt.
struct TimeAxis {
  double t0 = 0.0;
  double dt = 1.0;
  std::size_t steps = 0;  // M; samples are j = 0..M

  double time(std::size_t j) const { return t0 + static_cast<double>(j) * dt; }
  double horizon() const { return time(steps); }

  // Samples with t_j in (lo, hi], half-open as parabolic cylinders are.
  // Returns [first, last) in sample indices.
  std::pair<std::size_t, std::size_t> half_open(double lo, double hi) const {
    const double tol = 1e-9 * dt;
    const double a = std::floor((lo - t0 + tol) / dt) + 1.0;
    const double b = std::floor((hi - t0 + tol) / dt) + 1.0;
    const double first = std::clamp(a, 0.0, static_cast<double>(steps + 1));
    const double last = std::clamp(b, 0.0, static_cast<double>(steps + 1));
    return {static_cast<std::size_t>(first),
            static_cast<std::size_t>(std::max(first, last))};
  }
  // Samples with t_j in [lo, hi].
  std::pair<std::size_t, std::size_t> closed(double lo, double hi) const {
    const double tol = 1e-9 * dt;
    const double a = std::ceil((lo - t0 - tol) / dt);
    const double b = std::floor((hi - t0 + tol) / dt) + 1.0;
    const double first = std::clamp(a, 0.0, static_cast<double>(steps + 1));
    const double last = std::clamp(b, 0.0, static_cast<double>(steps + 1));
    return {static_cast<std::size_t>(first),
            static_cast<std::size_t>(std::max(first, last))};
  }
  bool operator==(const TimeAxis&) const = default;
};

}  // namespace harnack
