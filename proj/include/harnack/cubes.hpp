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
/* cubes.hpp - parabolic cube hierarchies.
 *
 * A cube is (l - 4s, l + 4s) x B_z(w). Its upper/lower halves are C+/C-,
 * the top/bottom eighths D+/D-, the top/bottom quarters I+/I-. The
 * collection C is grown by cutting every D+ and D- into zeta^2 time slabs
 * times zeta pieces per space axis and treating each piece as the D+ (or D-)
 * of a new cube one level down. C' does the same with I+/I- and is then
 * seeded at every cube of C, so level j of C' is the I-children of level
 * j-1 of C' together with level j of C.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "geometry.hpp"

namespace harnack {

enum class Lineage : std::uint8_t { Root, DPlus, DMinus, IPlus, IMinus };

inline const char* to_string(Lineage l) {
  switch (l) {
    case Lineage::Root: return "root";
    case Lineage::DPlus: return "D+";
    case Lineage::DMinus: return "D-";
    case Lineage::IPlus: return "I+";
    case Lineage::IMinus: return "I-";
  }
  return "?";
}

struct Cube {
  double l = 1.0;   // time center
  double s = 0.25;  // quarter-height scale; time extent is (l - 4s, l + 4s)
  double z = 0.5;   // spatial radius
  Point w = Point::origin(1);
  int level = 0;
  Lineage lineage = Lineage::Root;

  SpaceTimeRect rect() const { return SpaceTimeRect(l - 4 * s, l + 4 * s, Ball(w, z)); }
  double t_lo() const { return l - 4 * s; }
  double t_hi() const { return l + 4 * s; }
};

// C_0 = (0, 2) x B_{1/2}.
inline Cube root_cube(int n) {
  Cube c;
  c.w = Point::origin(n);
  return c;
}

struct CubeParams {
  int zeta = 4;             // division factor
  double d_frac = 1.0 / 8;  // |D+-| / |C|
  double i_frac = 1.0 / 4;  // |I+-| / |C|
  std::size_t max_cubes = 16'000'000;

  bool operator==(const CubeParams&) const = default;
};

struct SubcubeSet {
  SpaceTimeRect c_plus, c_minus, d_plus, d_minus, i_plus, i_minus;
};

inline SubcubeSet subcubes(const Cube& c, const CubeParams& p = {}) {
  const Ball b(c.w, c.z);
  const double lo = c.t_lo(), hi = c.t_hi(), H = hi - lo;
  return SubcubeSet{
      SpaceTimeRect(c.l, hi, b),
      SpaceTimeRect(lo, c.l, b),
      SpaceTimeRect(hi - p.d_frac * H, hi, b),
      SpaceTimeRect(lo, lo + p.d_frac * H, b),
      SpaceTimeRect(hi - p.i_frac * H, hi, b),
      SpaceTimeRect(lo, lo + p.i_frac * H, b),
  };
}

// Compact per-cube record; level geometry (s_j, z_j) lives in the hierarchy
// and the spatial center is root.w + c * z_j.
struct CubeRecord {
  double l;
  std::int32_t c[kMaxDim];
  std::int32_t parent;  // index in the parent level (of C for D-lineage)
  Lineage lineage;
};

inline int default_depth(int n) { return n == 1 ? 3 : 2; }

struct CubeHierarchy {
  Cube root;
  CubeParams params;
  int depth = 0;
  bool has_prime = false;
  std::vector<std::vector<CubeRecord>> C;       // C[0] = {root}
  std::vector<std::vector<CubeRecord>> Cprime;  // Cprime[0] = {root}

  int n() const { return root.w.dim; }
  double s_at(int j) const { return root.s * std::pow(params.zeta, -2.0 * j); }
  double z_at(int j) const { return root.z * std::pow(params.zeta, -1.0 * j); }

  Cube cube(const CubeRecord& r, int level) const {
    Cube c;
    c.l = r.l;
    c.s = s_at(level);
    c.z = z_at(level);
    c.w = root.w;
    for (int d = 0; d < n(); ++d) c.w[d] += r.c[d] * c.z;
    c.level = level;
    c.lineage = r.lineage;
    return c;
  }
};

// Cube counts a hierarchy of this depth would hold, by walking the
// construction rule (not the closed form), for the budget check.
inline std::size_t planned_cubes(int n, int depth, int zeta, bool with_prime) {
  const double pieces = std::pow(zeta, n + 2);
  double total = 1.0, c = 1.0, x = 1.0;
  for (int j = 1; j <= depth; ++j) {
    c *= 2.0 * pieces;
    total += c;
    if (with_prime) {
      x = 2.0 * pieces * x + c;
      total += x;
    }
  }
  return total > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(total);
}

namespace detail {

// Appends the zeta^{n+2} children obtained by cutting `target` of a level-j
// cube. plus: pieces are aligned to the top of the child, else the bottom.
inline void divide(const CubeHierarchy& h, const CubeRecord& parent, int j,
                   std::int32_t parent_index, bool plus, bool use_I,
                   Lineage tag, std::vector<CubeRecord>& out) {
  const CubeParams& p = h.params;
  const double s = h.s_at(j), s_child = h.s_at(j + 1);
  const double lo = parent.l - 4 * s, hi = parent.l + 4 * s, H = 8 * s;
  const double frac = use_I ? p.i_frac : p.d_frac;
  const double a = plus ? hi - frac * H : lo;
  const double slab = frac * H / (p.zeta * p.zeta);
  const int n = h.n();
  const int zeta = p.zeta;
  const int per_space = n == 1 ? zeta : zeta * zeta;
  for (int kt = 0; kt < zeta * zeta; ++kt) {
    const double plo = a + kt * slab, phi = a + (kt + 1) * slab;
    const double l_child = plus ? phi - 4 * s_child : plo + 4 * s_child;
    for (int ks = 0; ks < per_space; ++ks) {
      CubeRecord r;
      r.l = l_child;
      r.c[0] = zeta * parent.c[0] - zeta + 2 * (ks % zeta) + 1;
      r.c[1] = n == 2 ? zeta * parent.c[1] - zeta + 2 * (ks / zeta) + 1 : 0;
      r.parent = parent_index;
      r.lineage = tag;
      out.push_back(r);
    }
  }
}

inline CubeHierarchy build(const Cube& root, int depth, const CubeParams& p,
                           bool with_prime) {
  require(depth >= 0, "depth must be nonnegative");
  require(p.zeta >= 2, "division factor must be at least 2");
  require(p.d_frac > 0 && p.d_frac <= 0.5 && p.i_frac > 0 && p.i_frac <= 0.5,
          "D and I fractions must lie in (0, 1/2]");
  const int n = root.w.dim;
  const std::size_t planned = planned_cubes(n, depth, p.zeta, with_prime);
  if (planned > p.max_cubes)
    throw ResourceLimit("cube hierarchy of depth " + std::to_string(depth) + " needs " +
                        std::to_string(planned) + " cubes, budget is " +
                        std::to_string(p.max_cubes));
  CubeHierarchy h;
  h.root = root;
  h.params = p;
  h.depth = depth;
  h.has_prime = with_prime;
  const CubeRecord r0{root.l, {0, 0}, -1, Lineage::Root};
  h.C.push_back({r0});
  for (int j = 0; j < depth; ++j) {
    std::vector<CubeRecord> next;
    const double per = 2.0 * std::pow(p.zeta, n + 2);
    next.reserve(static_cast<std::size_t>(per * h.C[j].size()));
    for (std::size_t i = 0; i < h.C[j].size(); ++i) {
      const auto pi = static_cast<std::int32_t>(i);
      divide(h, h.C[j][i], j, pi, true, false, Lineage::DPlus, next);
      divide(h, h.C[j][i], j, pi, false, false, Lineage::DMinus, next);
    }
    h.C.push_back(std::move(next));
  }
  if (with_prime) {
    h.Cprime.push_back({r0});
    for (int j = 0; j < depth; ++j) {
      std::vector<CubeRecord> next;
      const double per = 2.0 * std::pow(p.zeta, n + 2);
      next.reserve(static_cast<std::size_t>(per * h.Cprime[j].size()) + h.C[j + 1].size());
      for (std::size_t i = 0; i < h.Cprime[j].size(); ++i) {
        const auto pi = static_cast<std::int32_t>(i);
        divide(h, h.Cprime[j][i], j, pi, true, true, Lineage::IPlus, next);
        divide(h, h.Cprime[j][i], j, pi, false, true, Lineage::IMinus, next);
      }
      next.insert(next.end(), h.C[j + 1].begin(), h.C[j + 1].end());
      h.Cprime.push_back(std::move(next));
    }
  }
  return h;
}

}  // namespace detail

inline CubeHierarchy build_C(const Cube& root, int depth, const CubeParams& p = {}) {
  return detail::build(root, depth, p, false);
}

inline CubeHierarchy build_Cprime(const Cube& root, int depth, const CubeParams& p = {}) {
  return detail::build(root, depth, p, true);
}

// Number of cubes of C' with spatial radius z_0 zeta^{-j}.
inline std::size_t count_level(const CubeHierarchy& h, int j) {
  if (j < 0 || j > h.depth)
    throw OutOfRange("level " + std::to_string(j) + " outside built depth " +
                     std::to_string(h.depth));
  if (!h.has_prime) throw StateError("hierarchy was built without the C' part");
  return h.Cprime[j].size();
}

inline std::size_t count_C_level(const CubeHierarchy& h, int j) {
  if (j < 0 || j > h.depth)
    throw OutOfRange("level " + std::to_string(j) + " outside built depth " +
                     std::to_string(h.depth));
  return h.C[j].size();
}

struct LevelBox {
  double t_lo, t_hi;
  double x_lo[kMaxDim], x_hi[kMaxDim];
};

inline LevelBox level_bounding_box(const CubeHierarchy& h,
                                   const std::vector<CubeRecord>& level, int j) {
  LevelBox b{1e300, -1e300, {1e300, 1e300}, {-1e300, -1e300}};
  const double s = h.s_at(j), z = h.z_at(j);
  for (const CubeRecord& r : level) {
    b.t_lo = std::min(b.t_lo, r.l - 4 * s);
    b.t_hi = std::max(b.t_hi, r.l + 4 * s);
    for (int d = 0; d < h.n(); ++d) {
      const double w = h.root.w[d] + r.c[d] * z;
      b.x_lo[d] = std::min(b.x_lo[d], w - z);
      b.x_hi[d] = std::max(b.x_hi[d], w + z);
    }
  }
  return b;
}

}  // namespace harnack
