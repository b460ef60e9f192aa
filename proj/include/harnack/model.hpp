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
/* model.hpp - the coefficient triple (A, f, g), its built-in families,
 * bound validation and initial conditions.
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "expression.hpp"
#include "fields.hpp"
#include "geometry.hpp"
#include "grid.hpp"

namespace harnack {

enum class DiffusionKind {
  Constant,   // A does not depend on (t, x, u): factor the solve once
  SpaceTime,  // A(t, x)
  General     // A(t, x, u)
};

struct CoefficientModel {
  int n = 1;
  int m = 4;
  double iota = 1.0;
  double Lambda = 0.5;

  // A(t, x, u) -> row-major symmetric n x n matrix in out[0..n*n).
  std::function<void(double, const Point&, double, double*)> A;
  std::function<double(double, const Point&, double)> f;
  // g(t, x, u) -> out[0..m).
  std::function<void(double, const Point&, double, double*)> g;

  DiffusionKind diffusion = DiffusionKind::Constant;
  bool isotropic = true;

  // Separable forms the solver can precompute on the grid:
  //   g_i = noise_scale * noise_profile[i](x) * u
  //   f   = reaction_scale * reaction_profile(x) * u + f0
  std::vector<std::function<double(const Point&)>> noise_profile;
  double noise_scale = 0.0;
  std::function<double(const Point&)> reaction_profile;
  double reaction_scale = 0.0;
  double f0 = 0.0;
  bool separable = false;

  bool deterministic() const { return m == 0 || (separable && noise_scale == 0.0); }
};

// Knobs that build a CoefficientModel; filled from the [model] section.
struct ModelSpec {
  std::string a_kind = "identity";  // identity | constant | random | expr
  double a0 = 1.0;
  std::string a_expr;
  std::uint64_t a_seed = 7;
  int a_modes = 4;
  std::string f_kind = "zero";      // zero | linear | sine | expr
  double lambda_f = 0.0;
  double f0 = 0.0;
  std::string f_expr;
  std::string g_kind = "profiles";  // profiles | uniform | zero | expr
  double lambda_g = 0.5;
  std::string g_expr;
  int m = 4;
  double iota = 1.0;
  double Lambda = 0.0;              // 0 means lambda_f + lambda_g
  bool check_bounds = true;

  bool operator==(const ModelSpec&) const = default;
};

// Channel profiles with |psi_i| <= 1, scaled by 1/sqrt(m) so sum sigma_i^2 <= 1.
// m = 4 gives 1/2 {1, cos(pi x / X), sin(pi x / X), cos(2 pi x / X)}.
inline std::vector<std::function<double(const Point&)>> default_noise_profiles(
    int n, int m, double X) {
  std::vector<std::function<double(const Point&)>> out;
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  const double w = std::numbers::pi / X;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      out.push_back([scale](const Point&) { return scale; });
      continue;
    }
    const int k = (i + 1) / 2;
    const int d = (n == 2 && i % 2 == 0) ? 1 : 0;
    if (i % 2 == 1)
      out.push_back([=](const Point& x) { return scale * std::cos(k * w * x[d]); });
    else
      out.push_back([=](const Point& x) { return scale * std::sin(k * w * x[d]); });
  }
  return out;
}

// Smooth random field chi(t, x) in [0, 1], built from a few periodic modes
// in the continuum so that refinement sees the same coefficient.
struct RandomModes {
  struct Mode {
    double c, omega, phase;
    int kx, ky;
  };
  std::vector<Mode> modes;
  double norm = 1.0;
  double X = 2.0;

  RandomModes() = default;
  RandomModes(std::uint64_t seed, int count, double X_) : X(X_) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    norm = 0.0;
    for (int i = 0; i < count; ++i) {
      Mode md;
      md.c = 0.5 + U(rng);
      md.omega = 2.0 * std::numbers::pi * U(rng);
      md.phase = 2.0 * std::numbers::pi * U(rng);
      md.kx = 1 + static_cast<int>(U(rng) * 3.0);
      md.ky = static_cast<int>(U(rng) * 3.0);
      norm += md.c;
      modes.push_back(md);
    }
  }
  double operator()(double t, const Point& x) const {
    const double w = std::numbers::pi / X;
    double s = 0.0;
    for (const Mode& md : modes) {
      double arg = md.omega * t + md.phase + md.kx * w * x[0];
      if (x.dim == 2) arg += md.ky * w * x[1];
      s += md.c * std::sin(arg);
    }
    return 0.5 + 0.5 * s / norm;
  }
};

inline CoefficientModel make_model(const ModelSpec& s, int n, double X) {
  require(s.iota > 0.0 && s.iota <= 1.0, "iota must lie in (0, 1]");
  require(s.m >= 0, "m must be nonnegative");
  CoefficientModel cm;
  cm.n = n;
  cm.m = s.g_kind == "zero" ? 0 : s.m;
  cm.iota = s.iota;
  cm.Lambda = s.Lambda > 0.0 ? s.Lambda : s.lambda_f + s.lambda_g;
  if (cm.Lambda <= 0.0) cm.Lambda = 1e-300;
  const int nn = n;

  if (s.a_kind == "identity" || s.a_kind == "constant") {
    const double a = s.a_kind == "identity" ? 1.0 : s.a0;
    cm.A = [a, nn](double, const Point&, double, double* out) {
      for (int i = 0; i < nn * nn; ++i) out[i] = 0.0;
      for (int i = 0; i < nn; ++i) out[i * nn + i] = a;
    };
    cm.diffusion = DiffusionKind::Constant;
  } else if (s.a_kind == "random") {
    const RandomModes chi(s.a_seed, s.a_modes, X);
    const double lo = s.iota, span = 1.0 / s.iota - s.iota;
    cm.A = [chi, lo, span, nn](double t, const Point& x, double, double* out) {
      const double a = lo + span * chi(t, x);
      for (int i = 0; i < nn * nn; ++i) out[i] = 0.0;
      for (int i = 0; i < nn; ++i) out[i * nn + i] = a;
    };
    cm.diffusion = DiffusionKind::SpaceTime;
  } else if (s.a_kind == "expr") {
    const auto ex = parse_expression_list(s.a_expr);
    if (!(ex.size() == 1 || (n == 2 && ex.size() == 3)))
      throw InvalidArgument("a_expr needs one entry (isotropic) or a11; a12; a22 in 2-d");
    cm.isotropic = ex.size() == 1;
    cm.A = [ex, nn](double t, const Point& x, double u, double* out) {
      const double x2 = nn == 2 ? x[1] : 0.0;
      if (ex.size() == 1) {
        const double a = ex[0](t, x[0], x2, u);
        for (int i = 0; i < nn * nn; ++i) out[i] = 0.0;
        for (int i = 0; i < nn; ++i) out[i * nn + i] = a;
      } else {
        out[0] = ex[0](t, x[0], x2, u);
        out[1] = out[2] = ex[1](t, x[0], x2, u);
        out[3] = ex[2](t, x[0], x2, u);
      }
    };
    cm.diffusion = DiffusionKind::General;
  } else {
    throw InvalidArgument("unknown a_kind '" + s.a_kind + "'");
  }

  const double lf = s.lambda_f, f0 = s.f0;
  bool f_separable = true;
  if (s.f_kind == "zero") {
    cm.reaction_profile = [](const Point&) { return 0.0; };
    cm.reaction_scale = 0.0;
  } else if (s.f_kind == "linear") {
    cm.reaction_profile = [](const Point&) { return 1.0; };
    cm.reaction_scale = lf;
  } else if (s.f_kind == "sine") {
    const double w = std::numbers::pi / X;
    cm.reaction_profile = [w](const Point& x) { return std::sin(w * x[0]); };
    cm.reaction_scale = lf;
  } else if (s.f_kind == "expr") {
    f_separable = false;
    const Expression ex(s.f_expr);
    cm.f = [ex, nn, f0](double t, const Point& x, double u) {
      return ex(t, x[0], nn == 2 ? x[1] : 0.0, u) + f0;
    };
  } else {
    throw InvalidArgument("unknown f_kind '" + s.f_kind + "'");
  }
  cm.f0 = f0;
  if (f_separable) {
    auto prof = cm.reaction_profile;
    const double rs = cm.reaction_scale;
    cm.f = [prof, rs, f0](double, const Point& x, double u) {
      return rs * prof(x) * u + f0;
    };
  }

  bool g_separable = true;
  if (s.g_kind == "profiles") {
    cm.noise_profile = default_noise_profiles(n, cm.m, X);
    cm.noise_scale = s.lambda_g;
  } else if (s.g_kind == "uniform") {
    const double c = 1.0 / std::sqrt(static_cast<double>(std::max(cm.m, 1)));
    for (int i = 0; i < cm.m; ++i)
      cm.noise_profile.push_back([c](const Point&) { return c; });
    cm.noise_scale = s.lambda_g;
  } else if (s.g_kind == "zero") {
    cm.noise_scale = 0.0;
  } else if (s.g_kind == "expr") {
    g_separable = false;
    const auto ex = parse_expression_list(s.g_expr);
    cm.m = static_cast<int>(ex.size());
    cm.g = [ex, nn](double t, const Point& x, double u, double* out) {
      for (std::size_t i = 0; i < ex.size(); ++i)
        out[i] = ex[i](t, x[0], nn == 2 ? x[1] : 0.0, u);
    };
  } else {
    throw InvalidArgument("unknown g_kind '" + s.g_kind + "'");
  }
  if (g_separable) {
    auto prof = cm.noise_profile;
    const double gs = cm.noise_scale;
    cm.g = [prof, gs](double, const Point& x, double u, double* out) {
      for (std::size_t i = 0; i < prof.size(); ++i) out[i] = gs * prof[i](x) * u;
    };
  }
  cm.separable = f_separable && g_separable;
  return cm;
}

struct ValidationReport {
  int samples = 0;
  double worst_ellipticity = 0.0;  // max violation of iota <= eig <= 1/iota
  double worst_growth = 0.0;       // max of (|f| + |g|) / (Lambda |u|)
  bool passed = true;
};

namespace detail {

inline void sym_eigs(const double* A, int n, double& lo, double& hi) {
  if (n == 1) {
    lo = hi = A[0];
    return;
  }
  const double a = A[0], b = 0.5 * (A[1] + A[2]), d = A[3];
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  lo = mid - rad;
  hi = mid + rad;
}

}  // namespace detail

// Draws (t, x, u) over [0, t_max] x box x [-u_max, u_max], plus u = 0 probes,
// and throws ModelInvalid with the first witness found.
inline ValidationReport validate_model(const CoefficientModel& cm,
                                       int sample_count, std::uint64_t seed,
                                       double X = 2.0, double t_max = 2.0,
                                       double u_max = 10.0) {
  require(sample_count >= 1, "validate_model needs at least one sample");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  ValidationReport rep;
  const int n = cm.n;
  std::vector<double> A(n * n), g(std::max(cm.m, 1));
  const double tol = 1e-12;
  for (int s = 0; s < sample_count; ++s) {
    const double t = t_max * U(rng);
    Point x(n);
    for (int d = 0; d < n; ++d) x[d] = -X + 2.0 * X * U(rng);
    const double u = (s % 16 == 0) ? 0.0 : u_max * (2.0 * U(rng) - 1.0);
    ++rep.samples;

    cm.A(t, x, u, A.data());
    if (n == 2 && std::abs(A[1] - A[2]) > tol * (1.0 + std::abs(A[1]))) {
      rep.passed = false;
      throw ModelInvalid("diffusion matrix is not symmetric", t, x.c.data(), n, u);
    }
    double lo, hi;
    detail::sym_eigs(A.data(), n, lo, hi);
    const double ev = std::max(cm.iota - lo, hi - 1.0 / cm.iota);
    rep.worst_ellipticity = std::max(rep.worst_ellipticity, ev);
    if (ev > tol) {
      rep.passed = false;
      std::ostringstream os;
      os << "ellipticity violated: eigenvalues in [" << lo << ", " << hi
         << "] but iota = " << cm.iota;
      throw ModelInvalid(os.str(), t, x.c.data(), n, u);
    }

    const double fv = cm.f(t, x, u);
    double gn = 0.0;
    if (cm.m > 0) {
      cm.g(t, x, u, g.data());
      for (int i = 0; i < cm.m; ++i) gn += g[i] * g[i];
    }
    const double lhs = std::abs(fv) + std::sqrt(gn);
    const double rhs = cm.Lambda * std::abs(u);
    if (rhs > 0.0) rep.worst_growth = std::max(rep.worst_growth, lhs / rhs);
    if (lhs > rhs + tol * (1.0 + rhs)) {
      rep.passed = false;
      std::ostringstream os;
      os << "growth bound violated: |f| + |g| = " << lhs << " > Lambda |u| = " << rhs;
      throw ModelInvalid(os.str(), t, x.c.data(), n, u);
    }
  }
  return rep;
}

// Initial data families.
struct InitialSpec {
  std::string kind = "gaussian";  // gaussian | bump | constant | bumps | expr
  double amplitude = 1.0;
  double width = 0.5;
  double center = 0.0;
  std::string expr;

  bool operator==(const InitialSpec&) const = default;
};

// Periodized Gaussian: sum over images so the datum is smooth on the torus.
inline double periodic_gaussian(const Point& x, const Point& c, double width,
                                double X) {
  double v = 1.0;
  for (int d = 0; d < x.dim; ++d) {
    double s = 0.0;
    for (int img = -3; img <= 3; ++img) {
      const double z = x[d] - c[d] + 2.0 * X * img;
      s += std::exp(-z * z / (2.0 * width * width));
    }
    v *= s;
  }
  return v;
}

// C^1 compactly supported bump: cos^2 in the max-norm radius.
inline double compact_bump(const Point& x, const Point& c, double width) {
  double r = 0.0;
  for (int d = 0; d < x.dim; ++d) r = std::max(r, std::abs(x[d] - c[d]));
  if (r >= width) return 0.0;
  const double v = std::cos(0.5 * std::numbers::pi * r / width);
  return v * v;
}

inline FieldSnapshot make_initial(const Grid& g, const InitialSpec& s,
                                  std::uint64_t seed = 0) {
  Point c(g.n);
  for (int d = 0; d < g.n; ++d) c[d] = s.center;
  if (s.kind == "gaussian")
    return FieldSnapshot::from_function(g, 0.0, [&](const Point& x) {
      return s.amplitude * periodic_gaussian(x, c, s.width, g.X);
    });
  if (s.kind == "bump")
    return FieldSnapshot::from_function(g, 0.0, [&](const Point& x) {
      return s.amplitude * compact_bump(x, c, s.width);
    });
  if (s.kind == "constant")
    return FieldSnapshot::from_function(g, 0.0,
                                        [&](const Point&) { return s.amplitude; });
  if (s.kind == "bumps") {
    // Three random periodized Gaussians; seed picks centers, widths, weights.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Point> cs;
    std::vector<double> ws, as;
    for (int i = 0; i < 3; ++i) {
      Point p(g.n);
      for (int d = 0; d < g.n; ++d) p[d] = -g.X + 2.0 * g.X * U(rng);
      cs.push_back(p);
      ws.push_back(0.2 + 0.4 * U(rng));
      as.push_back(s.amplitude * (0.2 + U(rng)));
    }
    return FieldSnapshot::from_function(g, 0.0, [&](const Point& x) {
      double v = 0.0;
      for (int i = 0; i < 3; ++i) v += as[i] * periodic_gaussian(x, cs[i], ws[i], g.X);
      return v;
    });
  }
  if (s.kind == "expr") {
    const Expression ex(s.expr);
    return FieldSnapshot::from_function(g, 0.0, [&](const Point& x) {
      return ex(0.0, x[0], g.n == 2 ? x[1] : 0.0, 0.0);
    });
  }
  throw InvalidArgument("unknown initial condition kind '" + s.kind + "'");
}

}  // namespace harnack
