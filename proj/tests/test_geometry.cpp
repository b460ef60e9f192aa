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
/* test_geometry.cpp - cylinders, membership, volumes and the covering */

#include <catch_amalgamated.hpp>

#include "oracles.hpp"

using namespace harnack;
using Catch::Approx;

TEST_CASE("cylinder construction", "[geometry]") {
  const SpaceTimeRect q1 = make_cylinder(1.0, Point{0.0}, 1.0);
  CHECK(q1.t_lo == 0.0);
  CHECK(q1.t_hi == 1.0);
  CHECK(q1.ball.radius == 1.0);
  CHECK(q1 == make_cylinder(1.0, 1));

  const SpaceTimeRect p = make_cylinder(2.0, Point{0.0}, 0.5);
  CHECK(p.t_lo == 1.75);
  CHECK(p.t_hi == 2.0);
  CHECK(p.ball.radius == 0.5);

  const SpaceTimeRect tiny = make_cylinder(0.0, Point{0.0}, 1e-3);
  CHECK(tiny.duration() == Approx(1e-6).epsilon(1e-12));

  CHECK_THROWS_AS(make_cylinder(1.0, Point{0.0}, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_cylinder(1.0, Point{0.0}, -1.0), InvalidArgument);
}

TEST_CASE("membership is half open in time and open in space", "[geometry]") {
  const SpaceTimeRect q1 = make_cylinder(1.0, 1);
  CHECK(contains(q1, 1.0, Point{0.0}));
  CHECK_FALSE(contains(q1, 0.0, Point{0.0}));
  CHECK_FALSE(contains(q1, 0.5, Point{1.0}));
  CHECK(contains(q1, 0.5, Point{0.999}));

  const SpaceTimeRect q2 = make_cylinder(1.0, 2);
  CHECK(contains(q2, 0.5, Point{0.9, -0.9}));
  CHECK_FALSE(contains(q2, 0.5, Point{0.9, 1.0}));
}

TEST_CASE("volumes", "[geometry]") {
  CHECK(volume(make_cylinder(1.0, 1)) == Approx(2.0));
  CHECK(volume(make_cylinder(1.0, Point{0.0, 0.0}, 0.5)) == Approx(0.25));
  double prev = 1.0;
  for (double r = 1e-1; r > 1e-6; r /= 10) {
    const double v = volume(make_cylinder(1.0, Point{0.0}, r));
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-17);
}

TEST_CASE("containment is monotone in the radius", "[geometry][property]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.5, 1.5), T(-0.5, 2.5), Rr(0.05, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double r1 = Rr(rng), r2 = Rr(rng);
    const double r = std::min(r1, r2), R = std::max(r1, r2);
    const Point x0{0.3, -0.2};
    const SpaceTimeRect small = make_cylinder(1.0, x0, r), big = make_cylinder(1.0, x0, R);
    CHECK(rect_within(small, big));
    for (int s = 0; s < 50; ++s) {
      const Point x{U(rng), U(rng)};
      const double t = T(rng);
      if (contains(small, t, x)) CHECK(contains(big, t, x));
    }
  }
}

TEST_CASE("covering soundness by exhaustive lattice membership", "[geometry]") {
  struct Case {
    double theta, R;
    int n, nt, nx;
  };
  for (const Case& c : {Case{0.75, 1.0, 1, 200, 200}, Case{2.0 / 3.0, 0.5, 2, 40, 40},
                        Case{0.6, 1.0, 1, 120, 120}, Case{0.9, 0.5, 1, 120, 120}}) {
    CAPTURE(c.theta, c.R, c.n);
    const auto centers = cover_cylinder(c.theta, c.R, c.n);
    const oracle::CoverCheck chk = oracle::check_cover(centers, c.theta, c.R, c.n, c.nt, c.nx);
    CHECK(chk.points > 0);
    CHECK(chk.uncovered == 0);
    for (const CoverCenter& cc : centers)
      CHECK(contains(make_cylinder(1.0, Point::origin(c.n), c.theta * c.R), cc.t, cc.x));
  }
}

TEST_CASE("covering cardinality obeys the lattice bound", "[geometry][property]") {
  for (int n : {1, 2}) {
    double worst = 0.0;
    for (double theta : {0.51, 0.55, 0.6, 0.7, 0.75, 0.8, 0.9, 0.95}) {
      for (double R : {1.0, 0.5, 0.25}) {
        const auto centers = cover_cylinder(theta, R, n);
        CHECK(centers.size() <= covering_bound(theta, n));
        worst = std::max(worst, centers.size() * std::pow(1.0 - theta, n + 2));
      }
    }
    CHECK(worst < covering_constant(n));
    // near the left endpoint the count is bounded by ceil(L 2^{n+2})
    CHECK(cover_cylinder(0.5 + 1e-9, 1.0, n).size() <=
          static_cast<std::size_t>(std::ceil(covering_constant(n) * std::pow(2.0, n + 2))));
  }
}

TEST_CASE("covering rejects theta outside (1/2, 1)", "[geometry]") {
  CHECK_THROWS_AS(cover_cylinder(0.5, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(cover_cylinder(1.0, 1.0, 1), InvalidArgument);
  CHECK_THROWS_AS(cover_cylinder(0.75, 0.0, 1), InvalidArgument);
  CHECK_THROWS_AS(cover_cylinder(0.75, 1.0, 3), InvalidArgument);
}

TEST_CASE("grid nodes of a ball and time sample ranges", "[geometry]") {
  const Grid g(1, 64);  // dx = 1/16
  CHECK(ball_nodes(g, Ball(Point{0.0}, 0.5)).size() == 16);
  const Grid g2(2, 32);  // dx = 1/8
  CHECK(ball_nodes(g2, Ball(Point{0.0, 0.0}, 0.5)).size() == 64);
  CHECK_THROWS_AS(ball_nodes(g, Ball(Point{1.8}, 0.5)), InvalidArgument);

  const TimeAxis a{0.0, 1.0 / 64, 128};
  const auto [j0, j1] = a.half_open(0.75, 1.0);
  CHECK(j0 == 49);
  CHECK(j1 == 65);
  const auto [c0, c1] = a.closed(0.75, 1.0);
  CHECK(c0 == 48);
  CHECK(c1 == 65);
}
