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
/* test_fields.cpp - mixed norms, extrema, the F functional, rescaling,
 * interpolation chains and negative-part energy
 */

#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace harnack;
using Catch::Approx;

namespace {

// dx = 1/16 and dt = 1/64: balls of radius k/32 and cylinders of radius
// 1/2 or 1/4 pick up their exact measure.
const Grid kGrid(1, 64);
const TimeAxis kAxis{0.0, 1.0 / 64, 128};

FieldPath constant_path(double c, const Grid& g = kGrid, const TimeAxis& a = kAxis) {
  return FieldPath::from_function(g, a, [c](double, const Point&) { return c; });
}

}  // namespace

TEST_CASE("mixed norm of a constant", "[fields]") {
  const FieldPath one = constant_path(1.0);
  for (double r : {0.5, 0.25}) {
    const SpaceTimeRect Q = make_cylinder(1.0, Point{0.0}, r);
    for (auto [p, q] : {std::pair{2.0, 2.0}, {4.0, 2.0}, {1.0, 3.0}, {0.5, 0.75}}) {
      CAPTURE(r, p, q);
      CHECK(lpq_norm(one, {p, q}, Q) ==
            Approx(std::pow(2 * r, 1 / q) * std::pow(r * r, 1 / p)).epsilon(1e-12));
    }
    CHECK(lpq_norm(one, {kInf, kInf}, Q) == 1.0);
    CHECK(lpq_norm(one, {kInf, 2.0}, Q) == Approx(std::sqrt(2 * r)));
  }
}

TEST_CASE("mixed norm is homogeneous", "[fields][property]") {
  const SpaceTimeRect Q = make_cylinder(1.0, 1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FieldPath u = oracle::random_field(s, kGrid, kAxis);
    FieldPath v = u;
    const double lam = -3.7;
    for (double& x : v.u) x *= lam;
    for (auto [p, q] : {std::pair{2.0, 2.0}, {4.0, 2.0}, {1.0, 1.0}, {kInf, 2.0}, {2.0, kInf},
                        {0.5, 0.5}}) {
      const double a = lpq_norm(u, {p, q}, Q), b = lpq_norm(v, {p, q}, Q);
      CHECK(b == Approx(std::abs(lam) * a).epsilon(1e-12));
    }
  }
}

TEST_CASE("L2 norm equals the direct double sum", "[fields]") {
  const SpaceTimeRect Q = make_cylinder(1.0, 1);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const FieldPath u = oracle::random_field(100 + s, kGrid, kAxis);
    CHECK(lpq_norm(u, {2, 2}, Q) == Approx(oracle::l22_norm(u, Q)).epsilon(1e-12));
  }
}

TEST_CASE("mixed norm is monotone in the region", "[fields][property]") {
  const SpaceTimeRect small = make_cylinder(1.0, Point{0.0}, 0.5);
  const SpaceTimeRect big = make_cylinder(1.0, 1);
  REQUIRE(rect_within(small, big));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FieldPath u = oracle::random_field(200 + s, kGrid, kAxis);
    for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 2.0}, {4.0, 2.0}, {2.0, kInf}})
      CHECK(lpq_norm(u, {p, q}, small) <= lpq_norm(u, {p, q}, big) * (1 + 1e-12));
  }
}

TEST_CASE("Hoelder consistency of the time exponent", "[fields][property]") {
  const SpaceTimeRect Q = make_cylinder(1.0, 1);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const FieldPath u = oracle::random_field(300 + s, kGrid, kAxis);
    for (auto [b, a] : {std::pair{1.0, 2.0}, {1.5, 2.0}, {2.0, 4.0}}) {
      const double I = Q.duration();
      CHECK(lpq_norm(u, {b, 2}, Q) <=
            lpq_norm(u, {a, 2}, Q) * std::pow(I, 1 / b - 1 / a) * (1 + 1e-12));
    }
  }
}

TEST_CASE("extrema on regions", "[fields]") {
  const SpaceTimeRect Q = make_cylinder(1.0, 1);
  const FieldPath five = constant_path(5.0);
  CHECK(sup_on(five, Q) == 5.0);
  CHECK(inf_on(five, Q) == 5.0);
  const FieldPath tt = FieldPath::from_function(kGrid, kAxis, [](double t, const Point&) { return t; });
  CHECK(sup_on(tt, Q) == 1.0);
  CHECK(inf_on(tt, Q) == Approx(1.0 / 64));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const FieldPath u = oracle::random_field(400 + s, kGrid, kAxis);
    CHECK(sup_on(u, Q) >= lpq_norm(u, {1, 1}, Q) / volume(Q) * (1 - 1e-12));
  }
  CHECK_THROWS_AS(sup_on(five, SpaceTimeRect(1.0, 3.0, Ball(Point{0.0}, 1.0))), InvalidArgument);
  CHECK_THROWS_AS(sup_on(five, SpaceTimeRect(0.5, 0.501, Ball(Point{0.0}, 1.0))), EmptyRegion);
}

TEST_CASE("F functional identities", "[fields]") {
  const SpaceTimeRect D1(1.75, 2.0, Ball(Point{0.0}, 0.5));
  const SpaceTimeRect D2(0.0, 0.25, Ball(Point{0.0}, 0.5));
  for (double c : {0.5, 1.0, 7.0})
    for (double a : {0.25, 1.0, 2.0})
      CHECK(F_functional(constant_path(c), a, 0.0, D1, D2) ==
            Approx(volume(D1) * volume(D2)).epsilon(1e-12));

  const FieldPath u = oracle::random_field(9, kGrid, kAxis);
  FieldPath v = u;
  for (double& x : v.u) x = 3.0 * (x + 0.1);
  FieldPath w = u;
  for (double& x : w.u) x = x + 0.1;
  CHECK(F_functional(v, 0.7, 0.0, D1, D2) ==
        Approx(F_functional(w, 0.7, 0.0, D1, D2)).epsilon(1e-12));
  CHECK_THROWS_AS(F_functional(constant_path(0.0), 1.0, 0.0, D1, D2), DomainError);
}

TEST_CASE("F functional against exponential integrals", "[fields]") {
  const Grid g(1, 512);  // dx = 1/128
  const TimeAxis a{0.0, 1.0 / 128, 256};
  const FieldPath e = FieldPath::from_function(g, a, [](double, const Point& x) { return std::exp(x[0]); });
  const SpaceTimeRect D1(1.5, 2.0, Ball(Point{0.25}, 0.5));
  const SpaceTimeRect D2(0.0, 0.5, Ball(Point{-0.5}, 0.75));
  for (double alpha : {0.5, 1.0, 2.0}) {
    auto integral = [](double lo, double hi, double k) {
      return (std::exp(k * hi) - std::exp(k * lo)) / k;
    };
    const double exact = 0.5 * integral(-0.25, 0.75, -alpha) * 0.5 * integral(-1.25, 0.25, alpha);
    CHECK(F_functional(e, alpha, 0.0, D1, D2) == Approx(exact).epsilon(0.01));
  }
}

TEST_CASE("rescaling", "[fields]") {
  const FieldPath u = oracle::random_field(5, kGrid, kAxis);
  const FieldPath same = rescale(u, 1.0);
  CHECK(same.u == u.u);

  const FieldPath tt = FieldPath::from_function(kGrid, kAxis, [](double t, const Point&) { return t; });
  const FieldPath r = rescale(tt, 0.5);
  for (std::size_t j = 0; j < r.samples(); j += 4)
    CHECK(r.at(j, 10) == Approx(r.time(j) / 4).margin(1e-15));

  const FieldPath f = FieldPath::from_function(
      kGrid, kAxis, [](double t, const Point& x) { return (1 + t) * std::cos(x[0]) + 0.1 * x[0]; });
  const double rr = 0.5;
  const FieldPath fr = rescale(f, rr);
  const double lhs = sup_on(fr, make_cylinder(1.0, Point{0.0}, 0.5));
  const double rhs = sup_on(f, make_cylinder(rr * rr, Point{0.0}, rr / 2));
  CHECK(lhs == Approx(rhs).epsilon(1e-12));

  CHECK_THROWS_AS(rescale(u, 0.0), InvalidArgument);
  CHECK_THROWS_AS(rescale(u, 1.5), InvalidArgument);
}

TEST_CASE("interpolation chains", "[fields]") {
  const SpaceTimeRect Q = make_cylinder(1.0, Point{0.0}, 0.5);
  const InterpolationReport c = interpolation_check(constant_path(2.0), 2.0, 1.5, 2.0, Q, 1e-3);
  CHECK(c.ok);
  CHECK(c.young > c.lhs);
  CHECK(c.rhs > c.lhs);
  CHECK(c.C == Approx(0.75));
  CHECK(c.gamma == Approx(1.0 / 3));

  std::size_t bad = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const FieldPath u = oracle::random_field(500 + s, kGrid, kAxis);
    for (double eps : {1e-3, 0.1, 1.0, 10.0}) {
      if (!interpolation_check(u, 2.0, 1.5, 2.0, Q, eps).ok) ++bad;
      if (!interpolation_space_check(u, 2.0, 2.0, 1.5, Q, eps).ok) ++bad;
    }
  }
  CHECK(bad == 0);

  // beta close to alpha: the second term carries the bound
  for (double beta : {1.9, 1.99, 1.999}) {
    const FieldPath u = oracle::random_field(77, kGrid, kAxis);
    const InterpolationReport r = interpolation_check(u, 2.0, beta, 2.0, Q, 0.5);
    CHECK(r.ok);
  }
  CHECK_THROWS_AS(interpolation_check(constant_path(1.0), 2.0, 0.9, 2.0, Q, 1.0), InvalidArgument);
  CHECK_THROWS_AS(interpolation_check(constant_path(1.0), 2.0, 2.0, 2.0, Q, 1.0), InvalidArgument);
}

TEST_CASE("log-convexity of the time exponent", "[fields][property]") {
  const SpaceTimeRect Q = make_cylinder(1.0, 1);
  for (std::uint64_t s = 0; s < 30; ++s) {
    const FieldPath u = oracle::random_field(600 + s, kGrid, kAxis);
    for (auto [a, b] : {std::pair{2.0, 1.5}, {4.0, 3.0}, {1.0, 0.6}}) {
      const double na = lpq_norm(u, {a, 2}, Q), nb = lpq_norm(u, {b, 2}, Q);
      const double ni = lpq_norm(u, {kInf, 2}, Q);
      CHECK(na <= std::pow(ni, 1 - b / a) * std::pow(nb, b / a) * (1 + 1e-12));
    }
  }
}

TEST_CASE("negative part energy", "[fields]") {
  const Grid g(1, 64);
  CHECK(neg_part_energy(make_initial(g, InitialSpec{})) == 0.0);

  const Grid g4(1, 4, 1.0);  // [-1, 1), dx = 1/2
  CHECK(neg_part_energy(FieldSnapshot(g4, 0.0, {-1, -1, -1, -1})) == 2.0);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> Z;
  std::vector<double> v(g.size());
  double oracle_sum = 0.0;
  for (double& x : v) {
    x = Z(rng);
    if (x < 0) oracle_sum += x * x;
  }
  CHECK(neg_part_energy(FieldSnapshot(g, 0.0, v)) == Approx(oracle_sum * g.dx()).epsilon(1e-14));
}

TEST_CASE("snapshots reject non-finite values", "[fields]") {
  const Grid g(1, 4);
  CHECK_THROWS_AS(FieldSnapshot(g, 0.0, {0, 1, 2}), InvalidArgument);
  CHECK_THROWS_AS(FieldSnapshot(g, 0.0, {0, 1, 2, std::nan("")}), InvalidArgument);
}
