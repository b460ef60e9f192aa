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
/* test_jn.cpp - log field, weighted averages, compensators and level sets */

#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace harnack;
using Catch::Approx;

namespace {

// Grid-aligned setting: dx = 1/16, dt = 1/64 on [0, 2]
const Grid kGrid(1, 64);
const TimeAxis kAxis{0.0, 1.0 / 64, 128};

SolverConfig config(double dt) {
  SolverConfig c;
  c.dt = dt;
  return c;
}

FieldPath stochastic_path(std::uint64_t seed) {
  return solve_path(make_initial(kGrid, InitialSpec{}), oracle::default_model(),
                    config(1.0 / 64), 2.0, seed);
}

// phi^2-weighted average over every node, the cutoff evaluated directly.
double H_oracle(const LogField& lf, const Cube& c, std::size_t j) {
  const FieldPath& p = *lf.source;
  double s = 0.0, v = 0.0;
  for (std::size_t k = 0; k < p.nodes(); ++k) {
    const Point x = p.grid.point(k);
    double r = 0.0;
    for (int d = 0; d < x.dim; ++d) r = std::max(r, std::abs(x[d] - c.w[d]));
    r /= 2.0 * c.z;
    double phi = 0.0;
    if (r <= 0.5) {
      phi = 1.0;
    } else if (r < 0.75) {
      const double q = (0.75 - r) / 0.25;
      phi = q * q * (3 - 2 * q);
    }
    s += lf.at(j, k) * phi * phi;
    v += phi * phi;
  }
  return s / v;
}

}  // namespace

TEST_CASE("log field values and scaling", "[jn]") {
  const double mu = 0.3;
  const FieldPath zero = FieldPath::from_function(kGrid, kAxis, [](double, const Point&) {
    return 0.0;
  });
  for (double h : logfield(zero, mu).h) CHECK(h == Approx(-std::log(mu)));
  const FieldPath e = FieldPath::from_function(kGrid, kAxis, [&](double, const Point&) {
    return std::exp(1.0) - mu;
  });
  for (double h : logfield(e, mu).h) CHECK(h == Approx(-1.0));

  // h for (c u, c mu) is h for (u, mu) shifted by -log c
  const FieldPath p = oracle::random_field(2, kGrid, kAxis);
  FieldPath q = p;
  for (double& v : q.u) v *= 3.0;
  const LogField a = logfield(p, mu), b = logfield(q, 3.0 * mu);
  for (std::size_t i = 0; i < a.h.size(); ++i) CHECK(b.h[i] == Approx(a.h[i] - std::log(3.0)));

  // the log decreases in mu
  const LogField c = logfield(p, 2.0 * mu);
  for (std::size_t i = 0; i < a.h.size(); ++i) CHECK(c.h[i] < a.h[i]);

  FieldPath neg = zero;
  neg.u[5] = -0.1;
  const LogField ln = logfield(neg, 0.5);
  CHECK(ln.clamped == 1);
  CHECK(ln.h[5] == Approx(-std::log(0.5)));
  neg.u[7] = -2.0;
  CHECK_THROWS_AS(logfield(neg, 1.0), DomainError);
  CHECK_THROWS_AS(logfield(zero, 0.0), InvalidArgument);
}

TEST_CASE("cube weighted averages", "[jn]") {
  const Cube c0 = root_cube(1);
  const FieldPath cst = FieldPath::from_function(kGrid, kAxis, [](double, const Point&) {
    return 0.7;
  });
  const LogField lc = logfield(cst, 0.1);
  CHECK(weighted_average_H(lc, c0, 0.0) == Approx(-std::log(0.8)));

  // h linear in x has its center value as the symmetric average
  const FieldPath lin = FieldPath::from_function(kGrid, kAxis, [](double t, const Point& x) {
    return std::exp(-(0.5 + 0.3 * x[0] + t)) - 0.1;
  });
  const LogField ll = logfield(lin, 0.1);
  CHECK(weighted_average_H(ll, c0, 0.0) == Approx(1.5).epsilon(1e-12));
  CHECK(weighted_average_H(ll, c0, -0.5) == Approx(1.0).epsilon(1e-12));

  // against the direct node sum on random fields and several cubes
  const CubeHierarchy h = build_C(c0, 1);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const FieldPath p = oracle::random_field(seed, kGrid, kAxis);
    const LogField lf = logfield(p, 0.05);
    CHECK(weighted_average_H(lf, c0, 0.25) == Approx(H_oracle(lf, c0, 80)).epsilon(1e-12));
    for (std::size_t i = 0; i < h.C[1].size(); i += 17) {
      const Cube c = h.cube(h.C[1][i], 1);
      const std::size_t j = static_cast<std::size_t>(std::llround(c.l / kAxis.dt));
      CHECK(weighted_average_H(lf, c, 0.0) == Approx(H_oracle(lf, c, j)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(weighted_average_H(lc, c0, 1.5), InvalidArgument);
  Cube wide = c0;
  wide.z = 1.5;
  CHECK_THROWS_AS(cube_weights(kGrid, wide), InvalidArgument);
  CHECK(master_cutoff(0.5) == 1.0);
  CHECK(master_cutoff(0.75) == 0.0);
}

TEST_CASE("compensating martingale", "[jn]") {
  const Cube c0 = root_cube(1);
  const CoefficientModel heat = oracle::heat_model();
  const FieldPath h = solve_path(make_initial(kGrid, InitialSpec{}), heat, config(1.0 / 64), 2.0, 1);
  const LogField lh = logfield(h, 0.01);
  const MSeries m0 = martingale_M(lh, heat, c0);
  CHECK(m0.M.front() == 0.0);
  for (double v : m0.M) CHECK(v == 0.0);
  CHECK(m0.qv_ratio == 0.0);
  CHECK(m0.t.back() == Approx(1.0));

  // final value against a direct loop over every node
  const CoefficientModel cm = oracle::default_model();
  const FieldPath p = stochastic_path(3);
  const LogField lf = logfield(p, 0.01);
  const MSeries ms = martingale_M(lf, cm, c0);
  CHECK(ms.M.front() == 0.0);
  REQUIRE(ms.M.size() == 65);
  double M = 0.0;
  std::vector<double> g(cm.m);
  for (std::size_t j = 64; j < 128; ++j) {
    double num = 0.0, V = 0.0;
    std::vector<double> acc(cm.m, 0.0);
    for (std::size_t k = 0; k < kGrid.size(); ++k) {
      const Point x = kGrid.point(k);
      const double phi = master_cutoff(std::abs(x[0]) / (2 * c0.z));
      if (phi == 0.0) continue;
      const double u = p.at(j, k);
      cm.g(p.time(j), x, u, g.data());
      for (int ch = 0; ch < cm.m; ++ch) acc[ch] += g[ch] / (std::max(u, 0.0) + 0.01) * phi * phi;
      V += phi * phi;
    }
    for (int ch = 0; ch < cm.m; ++ch) num += acc[ch] / V * p.increments(j)[ch];
    M += num;
  }
  CHECK(ms.M.back() == Approx(M).epsilon(1e-10));
  CHECK(ms.qv_ratio > 0.0);
}

TEST_CASE("compensator has mean zero across an ensemble", "[jn][statistical]") {
  const Cube c0 = root_cube(1);
  const CoefficientModel cm = oracle::default_model();
  std::vector<double> ends;
  for (std::uint64_t i = 0; i < 200; ++i) {
    const FieldPath p = stochastic_path(path_seed(21, i));
    ends.push_back(martingale_M(logfield(p, 0.01), cm, c0).M.back());
  }
  const MeanSE s = mean_se(ends);
  CHECK(s.se > 0.0);
  CHECK(std::abs(s.mean) <= 3.0 * s.se);
}

TEST_CASE("time reversal", "[jn]") {
  const FieldPath p = stochastic_path(5);
  const FieldPath r = reverse_path(p);
  CHECK(r.snapshot(0).values == p.snapshot(p.axis.steps).values);
  CHECK(r.dW[0] == -p.dW[p.dW.size() - static_cast<std::size_t>(p.m)]);
  const FieldPath rr = reverse_path(r);
  CHECK(rr.u == p.u);
  CHECK(rr.dW == p.dW);
  Cube c = root_cube(1);
  c.l = 0.5;
  CHECK(reflect_cube(c, p.axis).l == 1.5);
  CHECK(reflect_cube(reflect_cube(c, p.axis), p.axis).l == 0.5);
}

TEST_CASE("local oscillation check", "[jn]") {
  const Cube c0 = root_cube(1);
  const CoefficientModel heat = oracle::heat_model();
  const FieldPath cst = FieldPath::from_function(kGrid, kAxis, [](double, const Point&) {
    return 0.4;
  });
  const CubeStats s = local_bmo_check(logfield(cst, 0.1), heat, c0);
  CHECK(s.a_C == Approx(-std::log(0.5)));
  // a_C can sit one ulp off the constant, whose root is about 1e-8
  CHECK(s.plus_avg <= 1e-7);
  CHECK(s.minus_avg <= 1e-7);
  CHECK(s.H_series.size() == 129);

  const CoefficientModel cm = oracle::default_model();
  const FieldPath p = stochastic_path(8);
  const JNContext ctx(p, cm, 0.01);
  const CubeHierarchy h = build_C(c0, 1);
  for (std::size_t i = 0; i < h.C[1].size(); i += 9) {
    const CubeStats cs = local_bmo_check(ctx, h.cube(h.C[1][i], 1));
    CHECK(std::isfinite(cs.plus_avg));
    CHECK(std::isfinite(cs.minus_avg));
    CHECK(cs.plus_avg >= 0.0);
    CHECK(cs.minus_avg >= 0.0);
    CHECK(cs.H_series.empty());
  }
}

TEST_CASE("level set fractions", "[jn][property]") {
  const Cube c0 = root_cube(1);
  const std::vector<double> alphas = uniform_levels(1.0, 20);
  REQUIRE(alphas.front() == 0.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const FieldPath p = oracle::random_field(seed, kGrid, kAxis);
    const LevelSetFractions f = levelset_fractions(logfield(p, 0.01), c0, alphas);
    for (std::size_t i = 0; i < alphas.size(); ++i) {
      CHECK(f.plus[i] >= 0.0);
      CHECK(f.plus[i] <= 1.0);
      CHECK(f.minus[i] >= 0.0);
      CHECK(f.minus[i] <= 1.0);
      if (i > 0) {
        CHECK(f.plus[i] <= f.plus[i - 1]);
        CHECK(f.minus[i] <= f.minus[i - 1]);
      }
    }
  }
  const FieldPath cst = FieldPath::from_function(kGrid, kAxis, [](double, const Point&) {
    return 1.0;
  });
  // alpha = 0 is left out: the average may differ from h by one ulp
  const LevelSetFractions z = levelset_fractions(logfield(cst, 0.01), c0, alphas);
  for (std::size_t i = 1; i < alphas.size(); ++i) {
    CHECK(z.plus[i] == 0.0);
    CHECK(z.minus[i] == 0.0);
  }
}

TEST_CASE("exponential decay fit", "[jn]") {
  std::vector<double> a, f;
  for (int i = 0; i <= 10; ++i) {
    a.push_back(0.1 * i);
    f.push_back(2.0 * std::exp(-3.0 * a.back()));
  }
  const DecayFit d = fit_decay(a, f);
  CHECK(d.B == Approx(2.0));
  CHECK(d.b == Approx(3.0));
  CHECK(d.r2 == Approx(1.0));
  CHECK(d.points == 11);
  f[3] = 0.0;
  CHECK(fit_decay(a, f).points == 10);
  CHECK_THROWS_AS(fit_decay({0.0, 0.1, 0.2}, {1.0, 0.5, 0.0}), InsufficientData);
  CHECK_THROWS_AS(fit_decay({0.0, 0.1}, {1.0}), InvalidArgument);
}

TEST_CASE("reverse product and its tail", "[jn]") {
  const Cube c0 = root_cube(1);
  const SubcubeSet sc = subcubes(c0);
  // |D+| = |D-| = 1/4 exactly on this grid
  const FieldPath cst = FieldPath::from_function(kGrid, kAxis, [](double, const Point&) {
    return 0.6;
  });
  for (double nu : {0.25, 0.5}) {
    CHECK(F_root(cst, 0.01, nu, sc.d_plus, sc.d_minus) ==
          Approx(std::pow(1.0 / 16, 1.0 / nu)).epsilon(1e-12));
  }
  const std::vector<double> mus{1e-2, 1e-4};
  const std::vector<std::vector<double>> same(2, std::vector<double>(50, 0.3));
  const ReverseCSTail t = reverse_cs_tail(mus, same);
  CHECK(t.mu_stable);
  CHECK(t.rows.size() == 6);
  for (double v : t.variation) CHECK(v == 0.0);

  std::vector<std::vector<double>> vals(2);
  for (int i = 1; i <= 100; ++i) {
    vals[0].push_back(i);
    vals[1].push_back(2.0 * i);
  }
  const ReverseCSTail u = reverse_cs_tail(mus, vals);
  CHECK_FALSE(u.mu_stable);
  CHECK(u.rows[0].K_hat == 90.0);
  CHECK(u.rows[1].K_hat == 180.0);
  CHECK(u.variation[0] == Approx(1.0));
  CHECK_THROWS_AS(reverse_cs_tail({1e-2}, vals), InvalidArgument);
}
