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
/* linalg.hpp - the two linear solves the integrator needs: a periodic
 * tridiagonal system (1-d) and matrix-free conjugate gradients (2-d).
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"

namespace harnack {

// Symmetric cyclic tridiagonal matrix: diag[i] on the diagonal and
// off[i] coupling i with i+1 (mod N). Thomas on the rank-one corrected
// matrix plus a Sherman-Morrison update; the factorization is reusable.
class CyclicTridiagonal {
 public:
  CyclicTridiagonal() = default;
  CyclicTridiagonal(const std::vector<double>& diag, const std::vector<double>& off) {
    factor(diag, off);
  }

  void factor(const std::vector<double>& diag, const std::vector<double>& off) {
    const std::size_t N = diag.size();
    require(N >= 3 && off.size() == N, "cyclic tridiagonal needs N >= 3");
    N_ = N;
    // alpha = A[N-1][0], beta = A[0][N-1]; both equal off[N-1].
    alpha_ = beta_ = off[N - 1];
    gamma_ = -diag[0];
    lower_.assign(N, 0.0);
    for (std::size_t i = 1; i < N; ++i) lower_[i] = off[i - 1];
    upper_.assign(off.begin(), off.end());
    upper_[N - 1] = 0.0;
    std::vector<double> b(diag);
    b[0] -= gamma_;
    b[N - 1] -= alpha_ * beta_ / gamma_;

    cprime_.assign(N, 0.0);
    inv_.assign(N, 0.0);
    double den = b[0];
    if (den == 0.0) throw NumericError("singular tridiagonal pivot");
    inv_[0] = 1.0 / den;
    cprime_[0] = upper_[0] * inv_[0];
    for (std::size_t i = 1; i < N; ++i) {
      den = b[i] - lower_[i] * cprime_[i - 1];
      if (den == 0.0) throw NumericError("singular tridiagonal pivot");
      inv_[i] = 1.0 / den;
      cprime_[i] = upper_[i] * inv_[i];
    }

    std::vector<double> rhs(N, 0.0);
    rhs[0] = gamma_;
    rhs[N - 1] = alpha_;
    z_.assign(N, 0.0);
    thomas(rhs.data(), z_.data());
    zfact_ = 1.0 + z_[0] + beta_ * z_[N - 1] / gamma_;
  }

  void solve(const double* rhs, double* x) const {
    thomas(rhs, x);
    const double fact = (x[0] + beta_ * x[N_ - 1] / gamma_) / zfact_;
    for (std::size_t i = 0; i < N_; ++i) x[i] -= fact * z_[i];
  }

  std::size_t size() const { return N_; }

 private:
  void thomas(const double* r, double* x) const {
    x[0] = r[0] * inv_[0];
    for (std::size_t i = 1; i < N_; ++i)
      x[i] = (r[i] - lower_[i] * x[i - 1]) * inv_[i];
    for (std::size_t i = N_ - 1; i-- > 0;) x[i] -= cprime_[i] * x[i + 1];
  }

  std::size_t N_ = 0;
  double alpha_ = 0.0, beta_ = 0.0, gamma_ = 1.0, zfact_ = 1.0;
  std::vector<double> lower_, upper_, cprime_, inv_, z_;
};

struct CGResult {
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Conjugate gradients for an SPD operator; x holds the initial guess.
template <class Apply>
CGResult conjugate_gradient(Apply&& apply, const double* b, double* x,
                            std::size_t N, double tol, int max_iter,
                            std::vector<double>& r, std::vector<double>& p,
                            std::vector<double>& Ap) {
  r.resize(N);
  p.resize(N);
  Ap.resize(N);
  apply(x, Ap.data());
  double bnorm = 0.0, rr = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    r[i] = b[i] - Ap[i];
    p[i] = r[i];
    rr += r[i] * r[i];
    bnorm += b[i] * b[i];
  }
  bnorm = std::sqrt(bnorm);
  CGResult res;
  const double target = tol * (bnorm > 0.0 ? bnorm : 1.0);
  if (std::sqrt(rr) <= target) {
    res.converged = true;
    res.residual = std::sqrt(rr);
    return res;
  }
  for (int it = 1; it <= max_iter; ++it) {
    apply(p.data(), Ap.data());
    double pAp = 0.0;
    for (std::size_t i = 0; i < N; ++i) pAp += p[i] * Ap[i];
    if (!(pAp > 0.0)) break;
    const double alpha = rr / pAp;
    double rr_new = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * Ap[i];
      rr_new += r[i] * r[i];
    }
    res.iterations = it;
    res.residual = std::sqrt(rr_new);
    if (res.residual <= target) {
      res.converged = true;
      return res;
    }
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * p[i];
  }
  return res;
}

}  // namespace harnack
