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
/* solver.hpp - semi-implicit Euler-Maruyama for
 *   du = div(A grad u) dt + f dt + g_i dw^i
 * on the periodic grid, plus the weak-form residual and quadratic
 * variation diagnostics.
 *
 * One step solves (I - dt L) u_new = u_old + dt f(u_old) + g_i(u_old) dW_i
 * with L the conservative divergence-form difference operator and A frozen
 * at (t_old, u_old). Noise is evaluated at the left endpoint (Ito).
 */
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "fields.hpp"
#include "linalg.hpp"
#include "model.hpp"

namespace harnack {

enum class Scheme { SemiImplicit, Explicit };

inline std::string to_string(Scheme s) {
  return s == Scheme::SemiImplicit ? "semi-implicit" : "explicit";
}

struct SolverConfig {
  double dt = 1.0 / 2048.0;
  Scheme scheme = Scheme::SemiImplicit;
  double tol = 1e-10;       // CG relative residual (2-d only)
  bool record_noise = true;
  int max_iters = 20000;

  bool operator==(const SolverConfig&) const = default;
};

// L u for the frozen coefficient. In 1-d the face coefficient is the
// arithmetic mean of the nodal values; in 2-d each grid square carries the
// mean of its corner matrices and its energy is the average over the four
// corner-based one-sided gradients, which reduces to the 5-point stencil
// for A = Id and keeps L symmetric and mass conserving for any A.
class DiffusionOperator {
 public:
  DiffusionOperator() = default;
  explicit DiffusionOperator(const Grid& g) : g_(g) {
    pts_.resize(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) pts_[k] = g.point(k);
    coef_.assign(g.n == 1 ? g.size() : 3 * g.size(), 0.0);
    nodal_.assign(g.n == 1 ? g.size() : 3 * g.size(), 0.0);
  }

  const Grid& grid() const { return g_; }
  const std::vector<Point>& points() const { return pts_; }
  const std::vector<double>& coefficients() const { return coef_; }

  void assemble(const CoefficientModel& cm, double t, const double* u) {
    const int N = g_.N;
    double A[4];
    if (g_.n == 1) {
      for (int i = 0; i < N; ++i) {
        cm.A(t, pts_[i], u ? u[i] : 0.0, A);
        nodal_[i] = A[0];
      }
      for (int i = 0; i < N; ++i) coef_[i] = 0.5 * (nodal_[i] + nodal_[g_.wrap(i + 1)]);
      return;
    }
    for (std::size_t k = 0; k < g_.size(); ++k) {
      cm.A(t, pts_[k], u ? u[k] : 0.0, A);
      nodal_[3 * k] = A[0];
      nodal_[3 * k + 1] = 0.5 * (A[1] + A[2]);
      nodal_[3 * k + 2] = A[3];
    }
    for (int j = 0; j < N; ++j) {
      const int j1 = g_.wrap(j + 1);
      for (int i = 0; i < N; ++i) {
        const int i1 = g_.wrap(i + 1);
        const std::size_t s = g_.index(i, j);
        const std::size_t c[4] = {s, g_.index(i1, j), g_.index(i, j1), g_.index(i1, j1)};
        for (int e = 0; e < 3; ++e) {
          double acc = 0.0;
          for (std::size_t ck : c) acc += nodal_[3 * ck + e];
          coef_[3 * s + e] = 0.25 * acc;
        }
      }
    }
  }

  void apply(const double* u, double* out) const {
    const int N = g_.N;
    const double h2 = 1.0 / (g_.dx() * g_.dx());
    if (g_.n == 1) {
      for (int i = 0; i < N; ++i) {
        const int ip = g_.wrap(i + 1), im = g_.wrap(i - 1);
        out[i] = h2 * (coef_[i] * (u[ip] - u[i]) - coef_[im] * (u[i] - u[im]));
      }
      return;
    }
    for (std::size_t k = 0; k < g_.size(); ++k) out[k] = 0.0;
    // Gradients are in units of 1/dx, so dE/du carries dx^0 and
    // L u = -(1/dx^2) dE/du.
    for (int j = 0; j < N; ++j) {
      const int j1 = g_.wrap(j + 1);
      for (int i = 0; i < N; ++i) {
        const int i1 = g_.wrap(i + 1);
        const std::size_t s = g_.index(i, j);
        const std::size_t p00 = s, p10 = g_.index(i1, j), p01 = g_.index(i, j1),
                          p11 = g_.index(i1, j1);
        const double a11 = coef_[3 * s], a12 = coef_[3 * s + 1], a22 = coef_[3 * s + 2];
        const double dxb = u[p10] - u[p00];  // bottom edge
        const double dxt = u[p11] - u[p01];  // top edge
        const double dyl = u[p01] - u[p00];  // left edge
        const double dyr = u[p11] - u[p10];  // right edge
        // corner gradients (gx, gy): 00:(b,l) 10:(b,r) 01:(t,l) 11:(t,r)
        const double gx[4] = {dxb, dxb, dxt, dxt};
        const double gy[4] = {dyl, dyr, dyl, dyr};
        double fb = 0.0, ft = 0.0, fl = 0.0, fr = 0.0;
        for (int c = 0; c < 4; ++c) {
          const double wx = a11 * gx[c] + a12 * gy[c];
          const double wy = a12 * gx[c] + a22 * gy[c];
          if (c < 2) fb += wx; else ft += wx;
          if (c % 2 == 0) fl += wy; else fr += wy;
        }
        fb *= 0.25; ft *= 0.25; fl *= 0.25; fr *= 0.25;
        // dE/du of each edge difference, then L = -dE/du / dx^2.
        out[p10] -= h2 * fb; out[p00] += h2 * fb;
        out[p11] -= h2 * ft; out[p01] += h2 * ft;
        out[p01] -= h2 * fl; out[p00] += h2 * fl;
        out[p11] -= h2 * fr; out[p10] += h2 * fr;
      }
    }
  }

 private:
  Grid g_;
  std::vector<Point> pts_;
  std::vector<double> coef_, nodal_;
};

// Grid samples of f and g at one time; separable models skip std::function.
class SourceEvaluator {
 public:
  SourceEvaluator() = default;
  SourceEvaluator(const Grid& g, const CoefficientModel& cm) : cm_(&cm), N_(g.size()) {
    pts_.resize(N_);
    for (std::size_t k = 0; k < N_; ++k) pts_[k] = g.point(k);
    if (cm.separable) {
      react_.resize(N_);
      for (std::size_t k = 0; k < N_; ++k)
        react_[k] = cm.reaction_scale * (cm.reaction_profile ? cm.reaction_profile(pts_[k]) : 0.0);
      sigma_.assign(static_cast<std::size_t>(cm.m) * N_, 0.0);
      for (int i = 0; i < cm.m; ++i)
        for (std::size_t k = 0; k < N_; ++k)
          sigma_[i * N_ + k] = cm.noise_scale * cm.noise_profile[i](pts_[k]);
    }
    gtmp_.resize(std::max(cm.m, 1));
  }

  // f at every node.
  void f(double t, const double* u, double* out) const {
    if (cm_->separable) {
      for (std::size_t k = 0; k < N_; ++k) out[k] = react_[k] * u[k] + cm_->f0;
    } else {
      for (std::size_t k = 0; k < N_; ++k) out[k] = cm_->f(t, pts_[k], u[k]);
    }
  }
  // g_i at every node, channel-major: out[i * N + k].
  void g(double t, const double* u, double* out) {
    const int m = cm_->m;
    if (cm_->separable) {
      for (int i = 0; i < m; ++i)
        for (std::size_t k = 0; k < N_; ++k) out[i * N_ + k] = sigma_[i * N_ + k] * u[k];
    } else {
      for (std::size_t k = 0; k < N_; ++k) {
        cm_->g(t, pts_[k], u[k], gtmp_.data());
        for (int i = 0; i < m; ++i) out[i * N_ + k] = gtmp_[i];
      }
    }
  }
  // sum_i g_i dW_i at every node.
  void noise(double t, const double* u, const double* dW, double* out) {
    const int m = cm_->m;
    if (cm_->separable) {
      for (std::size_t k = 0; k < N_; ++k) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += sigma_[i * N_ + k] * dW[i];
        out[k] = s * u[k];
      }
    } else {
      for (std::size_t k = 0; k < N_; ++k) {
        cm_->g(t, pts_[k], u[k], gtmp_.data());
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += gtmp_[i] * dW[i];
        out[k] = s;
      }
    }
  }

 private:
  const CoefficientModel* cm_ = nullptr;
  std::size_t N_ = 0;
  std::vector<Point> pts_;
  std::vector<double> react_, sigma_, gtmp_;
};

inline double explicit_dt_limit(const Grid& g, double iota) {
  return g.dx() * g.dx() * iota / (2.0 * g.n);
}

class Stepper {
 public:
  Stepper(const Grid& g, const CoefficientModel& cm, const SolverConfig& cfg)
      : g_(g), cm_(cm), cfg_(cfg), op_(g), src_(g, cm) {
    require(cfg.dt > 0.0, "dt must be positive");
    require(cm.n == g.n, "model dimension does not match grid");
    if (cfg.scheme == Scheme::Explicit && cfg.dt > explicit_dt_limit(g, cm.iota) * (1.0 + 1e-12))
      throw InvalidArgument("explicit scheme needs dt <= dx^2 iota / (2n)");
    const std::size_t N = g.size();
    rhs_.resize(N);
    work_.resize(N);
    diag_.resize(N);
    off_.resize(N);
  }

  // u_new from u_old over [t, t + dt]; step_index only labels errors.
  void step(double t, const double* u_old, const double* dW, double* u_new,
            std::size_t step_index) {
    const std::size_t N = g_.size();
    const double dt = cfg_.dt;
    src_.f(t, u_old, work_.data());
    for (std::size_t k = 0; k < N; ++k) rhs_[k] = u_old[k] + dt * work_[k];
    if (cm_.m > 0 && dW) {
      src_.noise(t, u_old, dW, work_.data());
      for (std::size_t k = 0; k < N; ++k) rhs_[k] += work_[k];
    }

    const bool frozen = cm_.diffusion == DiffusionKind::Constant && assembled_;
    if (!frozen) {
      op_.assemble(cm_, t, u_old);
      assembled_ = true;
    }

    if (cfg_.scheme == Scheme::Explicit) {
      op_.apply(u_old, work_.data());
      for (std::size_t k = 0; k < N; ++k) u_new[k] = rhs_[k] + dt * work_[k];
    } else if (g_.n == 1) {
      if (!frozen || !factored_) {
        const double c = dt / (g_.dx() * g_.dx());
        const auto& kap = op_.coefficients();
        for (int i = 0; i < g_.N; ++i) {
          diag_[i] = 1.0 + c * (kap[i] + kap[g_.wrap(i - 1)]);
          off_[i] = -c * kap[i];
        }
        tri_.factor(diag_, off_);
        factored_ = true;
      }
      tri_.solve(rhs_.data(), u_new);
    } else {
      for (std::size_t k = 0; k < N; ++k) u_new[k] = u_old[k];
      auto apply = [&](const double* x, double* y) {
        op_.apply(x, y);
        for (std::size_t k = 0; k < N; ++k) y[k] = x[k] - dt * y[k];
      };
      const CGResult r = conjugate_gradient(apply, rhs_.data(), u_new, N, cfg_.tol,
                                            cfg_.max_iters, cg_r_, cg_p_, cg_ap_);
      if (!r.converged)
        throw NumericError("linear solve did not converge at step " +
                           std::to_string(step_index));
    }
    for (std::size_t k = 0; k < N; ++k)
      if (!std::isfinite(u_new[k])) throw BlowUp("non-finite value", step_index);
  }

  const DiffusionOperator& op() const { return op_; }

 private:
  Grid g_;
  const CoefficientModel& cm_;
  SolverConfig cfg_;
  DiffusionOperator op_;
  SourceEvaluator src_;
  CyclicTridiagonal tri_;
  bool assembled_ = false, factored_ = false;
  std::vector<double> rhs_, work_, diag_, off_, cg_r_, cg_p_, cg_ap_;
};

// Single step on snapshots.
inline FieldSnapshot step(const FieldSnapshot& state, const CoefficientModel& cm,
                          const SolverConfig& cfg, const std::vector<double>& dW) {
  require(static_cast<int>(dW.size()) == cm.m, "need one increment per channel");
  Stepper st(state.grid, cm, cfg);
  std::vector<double> out(state.values.size());
  st.step(state.t, state.values.data(), dW.data(), out.data(), 0);
  return FieldSnapshot(state.grid, state.t + cfg.dt, std::move(out));
}

// M x m independent N(0, dt) draws, step-major.
inline std::vector<double> brownian_increments(std::uint64_t seed, std::size_t M,
                                               int m, double dt) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> Z(0.0, 1.0);
  const double s = std::sqrt(dt);
  std::vector<double> out(M * static_cast<std::size_t>(m));
  for (double& v : out) v = s * Z(rng);
  return out;
}

// Sums consecutive blocks of `factor` steps: the same Brownian path seen
// with a coarser step.
inline std::vector<double> coarsen_increments(const std::vector<double>& fine,
                                              int m, std::size_t factor) {
  require(m > 0 && factor > 0, "coarsen needs m > 0 and factor > 0");
  const std::size_t Mf = fine.size() / m;
  require(Mf % factor == 0, "fine step count is not a multiple of the factor");
  const std::size_t Mc = Mf / factor;
  std::vector<double> out(Mc * m, 0.0);
  for (std::size_t j = 0; j < Mc; ++j)
    for (std::size_t r = 0; r < factor; ++r)
      for (int i = 0; i < m; ++i) out[j * m + i] += fine[(j * factor + r) * m + i];
  return out;
}

inline std::size_t step_count(double T, double dt) {
  require(T > 0.0 && dt > 0.0, "horizon and dt must be positive");
  const double r = T / dt;
  const double M = std::round(r);
  if (std::abs(r - M) > 1e-9 * std::max(1.0, r))
    throw InvalidArgument("horizon is not an integer multiple of dt");
  return static_cast<std::size_t>(M);
}

// Integrates with the given increments (may be null when m == 0) and hands
// each snapshot to obs(j, t_j, u_j) as it is produced.
template <class Observer>
void integrate(const FieldSnapshot& u0, const CoefficientModel& cm,
               const SolverConfig& cfg, std::size_t M, const double* dW,
               Observer&& obs) {
  const Grid& g = u0.grid;
  Stepper st(g, cm, cfg);
  std::vector<double> a(u0.values), b(g.size());
  obs(std::size_t{0}, u0.t, a.data());
  for (std::size_t j = 0; j < M; ++j) {
    const double t = u0.t + static_cast<double>(j) * cfg.dt;
    st.step(t, a.data(), dW ? dW + j * static_cast<std::size_t>(cm.m) : nullptr,
            b.data(), j);
    a.swap(b);
    obs(j + 1, u0.t + static_cast<double>(j + 1) * cfg.dt, a.data());
  }
}

inline FieldPath solve_path_with_increments(const FieldSnapshot& u0,
                                            const CoefficientModel& cm,
                                            const SolverConfig& cfg, double T,
                                            std::vector<double> dW,
                                            std::uint64_t seed = 0) {
  const std::size_t M = step_count(T, cfg.dt);
  if (cm.m > 0)
    require(dW.size() == M * static_cast<std::size_t>(cm.m),
            "increment count must equal steps x channels");
  TimeAxis ax{u0.t, cfg.dt, M};
  FieldPath path(u0.grid, ax, cm.m);
  path.seed = seed;
  const std::size_t N = u0.grid.size();
  integrate(u0, cm, cfg, M, cm.m > 0 ? dW.data() : nullptr,
            [&](std::size_t j, double, const double* u) {
              std::copy(u, u + N, path.snap(j));
            });
  if (cfg.record_noise) {
    path.dW = std::move(dW);
    path.has_noise = true;
  }
  return path;
}

inline FieldPath solve_path(const FieldSnapshot& u0, const CoefficientModel& cm,
                            const SolverConfig& cfg, double T, std::uint64_t seed) {
  const std::size_t M = step_count(T, cfg.dt);
  return solve_path_with_increments(u0, cm, cfg, T,
                                    brownian_increments(seed, M, cm.m, cfg.dt), seed);
}

// Smooth nonnegative test function: product of cos^2 bumps of half width
// `radius` around `center`, required to vanish within two nodes of the seam.
struct TestFunction {
  Grid grid;
  std::vector<double> phi;

  TestFunction(const Grid& g, std::vector<double> v) : grid(g), phi(std::move(v)) {
    require(phi.size() == g.size(), "test function size does not match grid");
    for (std::size_t k = 0; k < phi.size(); ++k) {
      require(phi[k] >= 0.0 && std::isfinite(phi[k]), "test function must be nonnegative");
      if (phi[k] == 0.0) continue;
      const int i0 = static_cast<int>(k % g.N);
      const int i1 = g.n == 2 ? static_cast<int>(k / g.N) : 2;
      auto near_seam = [&](int i) { return i < 2 || i >= g.N - 2; };
      if (near_seam(i0) || near_seam(i1))
        throw InvalidArgument("test function support reaches the periodic seam");
    }
  }

  static TestFunction bump(const Grid& g, const Point& center, double radius) {
    std::vector<double> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) {
      const Point x = g.point(k);
      double p = 1.0;
      for (int d = 0; d < g.n; ++d) {
        const double z = std::abs(x[d] - center[d]) / radius;
        if (z >= 1.0) {
          p = 0.0;
          break;
        }
        const double c = std::cos(0.5 * std::numbers::pi * z);
        p *= c * c;
      }
      v[k] = p;
    }
    return TestFunction(g, std::move(v));
  }
};

inline double inner(const double* a, const double* b, const Grid& g) {
  double s = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) s += a[k] * b[k];
  return s * g.cell_volume();
}

namespace detail {

inline void check_noise_for(const FieldPath& path, const CoefficientModel& cm) {
  require(path.grid.n == cm.n, "model dimension does not match path");
  if (cm.m == 0) return;
  path.require_noise();
  if (path.m != cm.m) throw StateError("path channel count does not match the model");
}

inline std::size_t sample_of(const FieldPath& path, double t) {
  const double r = (t - path.axis.t0) / path.axis.dt;
  const double j = std::round(r);
  require(j >= 0.0 && j <= static_cast<double>(path.axis.steps) &&
              std::abs(r - j) < 1e-6,
          "time is not a sample of the path");
  return static_cast<std::size_t>(j);
}

}  // namespace detail

// |<u(t) - u(s), phi> + sum dt <A grad u_j, grad phi> - sum dt <f_j, phi>
//   - sum_i <g_i(u_j), phi> dW_ij|, left-point in every term; the discrete
// Dirichlet form <A grad u, grad phi> is -<L u, phi>.
inline double weak_residual(const FieldPath& path, const CoefficientModel& cm,
                            const TestFunction& phi, double s, double t) {
  detail::check_noise_for(path, cm);
  require(phi.grid == path.grid, "test function grid does not match path");
  const std::size_t js = detail::sample_of(path, s), jt = detail::sample_of(path, t);
  require(js < jt, "weak residual needs s < t");
  const Grid& g = path.grid;
  const std::size_t N = g.size();
  DiffusionOperator op(g);
  SourceEvaluator src(g, cm);
  std::vector<double> Lu(N), fv(N), gv(N * std::max(cm.m, 1));
  const double dt = path.axis.dt;
  double acc = inner(path.snap(jt), phi.phi.data(), g) - inner(path.snap(js), phi.phi.data(), g);
  bool assembled = false;
  for (std::size_t j = js; j < jt; ++j) {
    const double tj = path.time(j);
    const double* u = path.snap(j);
    if (!(assembled && cm.diffusion == DiffusionKind::Constant)) {
      op.assemble(cm, tj, u);
      assembled = true;
    }
    op.apply(u, Lu.data());
    src.f(tj, u, fv.data());
    double drift = 0.0;
    for (std::size_t k = 0; k < N; ++k) drift += (Lu[k] + fv[k]) * phi.phi[k];
    acc -= dt * drift * g.cell_volume();
    if (cm.m > 0) {
      src.g(tj, u, gv.data());
      const double* dW = path.increments(j);
      for (int i = 0; i < cm.m; ++i)
        acc -= inner(gv.data() + i * N, phi.phi.data(), g) * dW[i];
    }
  }
  return std::abs(acc);
}

struct QVReport {
  double empirical_qv = 0.0;  // sum_j (d<u, phi> - drift_j)^2
  double pairing_qv = 0.0;    // sum_i sum_j <g_i, phi>^2 dt
  double squared_qv = 0.0;    // sum_i sum_j <g_i^2, phi^2> dt
};

// Over the whole path; drift_j = dt <L_j u_j + f_j, phi>, the same
// left-point discretization the weak residual uses.
inline QVReport qv_check(const FieldPath& path, const CoefficientModel& cm,
                         const TestFunction& phi) {
  detail::check_noise_for(path, cm);
  require(phi.grid == path.grid, "test function grid does not match path");
  const Grid& g = path.grid;
  const std::size_t N = g.size();
  DiffusionOperator op(g);
  SourceEvaluator src(g, cm);
  std::vector<double> Lu(N), fv(N), gv(N * std::max(cm.m, 1)), phi2(N);
  for (std::size_t k = 0; k < N; ++k) phi2[k] = phi.phi[k] * phi.phi[k];
  const double dt = path.axis.dt;
  QVReport r;
  bool assembled = false;
  for (std::size_t j = 0; j < path.axis.steps; ++j) {
    const double tj = path.time(j);
    const double* u = path.snap(j);
    if (!(assembled && cm.diffusion == DiffusionKind::Constant)) {
      op.assemble(cm, tj, u);
      assembled = true;
    }
    op.apply(u, Lu.data());
    src.f(tj, u, fv.data());
    double drift = 0.0;
    for (std::size_t k = 0; k < N; ++k) drift += (Lu[k] + fv[k]) * phi.phi[k];
    drift *= dt * g.cell_volume();
    const double du = inner(path.snap(j + 1), phi.phi.data(), g) - inner(u, phi.phi.data(), g);
    r.empirical_qv += (du - drift) * (du - drift);
    if (cm.m > 0) {
      src.g(tj, u, gv.data());
      for (int i = 0; i < cm.m; ++i) {
        const double* gi = gv.data() + i * N;
        const double p = inner(gi, phi.phi.data(), g);
        r.pairing_qv += p * p * dt;
        double sq = 0.0;
        for (std::size_t k = 0; k < N; ++k) sq += gi[k] * gi[k] * phi2[k];
        r.squared_qv += sq * g.cell_volume() * dt;
      }
    }
  }
  return r;
}

}  // namespace harnack
