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
/* test_config.cpp - configuration parsing, validation and printing */

#include <catch_amalgamated.hpp>

#include <random>

#include "harnack/harnack.hpp"

using namespace harnack;
using Catch::Matchers::ContainsSubstring;

namespace {

// Line number carried by the parse error of `text`, or -1 if it parses.
int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.line;
  }
  return -1;
}

std::string error_text(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("empty file gives the defaults", "[config]") {
  const ExperimentSpec s = parse_config("");
  CHECK(s == ExperimentSpec{});
  CHECK(s.n == 1);
  CHECK(s.N == 200);
  CHECK(s.Q.t_lo == 0.75);
  CHECK(s.P.t_hi == 2.0);
  CHECK(s.effective_dt() == 0.5 * (4.0 / 128) * (4.0 / 128));
  CHECK(s.solver().dt == s.effective_dt());
  CHECK(parse_config("# nothing\n\n[grid]\n# still nothing\n") == ExperimentSpec{});
}

TEST_CASE("values and region syntaxes", "[config]") {
  const ExperimentSpec s = parse_config(R"([grid]
n = 2
nodes = 32
[model]
g_kind = expr   # trailing comment
g_expr = "0.1 * u; 0.2 * u"
m = 2
check_bounds = no
[solver]
dt = 0.0078125
scheme = explicit
[regions]
Q = {1.0, (0.1, -0.1), 0.25}
P = {t_lo = 1.5, t_hi = 2, center = 0, radius = 0.5}
positivity = {t0 = 2, x0 = (0, 0), r = 0.5}
[montecarlo]
N = 0x10
gammas = 1, 2, 4
)");
  CHECK(s.n == 2);
  CHECK(s.nodes == 32);
  CHECK(s.model.g_expr == "0.1 * u; 0.2 * u");
  CHECK_FALSE(s.model.check_bounds);
  CHECK(s.scheme == Scheme::Explicit);
  CHECK(s.Q.t_lo == 1.0 - 0.0625);
  CHECK(s.Q.center == std::vector<double>{0.1, -0.1});
  CHECK(s.P.t_lo == 1.5);
  CHECK(s.P.rect(2).ball.center == Point{0.0, 0.0});
  CHECK(s.positivity.t_lo == 1.75);
  CHECK(s.positivity.center == std::vector<double>{0.0, 0.0});
  CHECK(s.N == 16);
  CHECK(s.gammas == std::vector<double>{1, 2, 4});
}

TEST_CASE("errors carry the line of the offending key", "[config]") {
  CHECK(error_line("[grid]\nn = 1\nnodes = lots\n") == 3);
  CHECK_THAT(error_text("[grid]\nn = 1\nnodes = lots\n"), ContainsSubstring("expects an integer"));
  CHECK(error_line("[grid]\nn = 1\nn = 2\n") == 3);
  CHECK_THAT(error_text("[grid]\nn = 1\nn = 2\n"), ContainsSubstring("duplicate key 'n'"));
  CHECK(error_line("[gird]\n") == 1);
  CHECK(error_line("n = 1\n") == 1);
  CHECK(error_line("[grid]\njust words\n") == 2);
  CHECK(error_line("[grid\n") == 1);
  CHECK(error_line("[solver]\nrecord_noise = maybe\n") == 2);
  CHECK(error_line("[solver]\nscheme = rk4\n") == 2);
  CHECK(error_line("[montecarlo]\nN = -3\n") == 2);
  CHECK(error_line("[regions]\nQ = {1, 0}\n") == 2);
  CHECK(error_line("[regions]\nQ = {1, 0, -0.5}\n") == 2);
  CHECK(error_line("[regions]\nQ = {t0 = 1, 0, 0.5}\n") == 2);
  CHECK(error_line("[regions]\nP = {2, 1, 0, 0.5}\n") == 2);  // t_lo >= t_hi
  CHECK(error_line("[grid]\nnodes =\n") == 2);
}

TEST_CASE("unknown keys get a hint", "[config]") {
  CHECK_THAT(error_text("[model]\nfo = 1\n"), ContainsSubstring("did you mean 'f0'?"));
  CHECK_THAT(error_text("[model]\nlamda_g = 1\n"), ContainsSubstring("did you mean 'lambda_g'?"));
  CHECK_THAT(error_text("[grid]\nN = 100\n"), ContainsSubstring("(it belongs in [montecarlo])"));
  CHECK_THAT(error_text("[grid]\nzzzzzzzz = 1\n"), !ContainsSubstring("did you mean"));
}

TEST_CASE("cross-field validation", "[config]") {
  // Q after P: reported at the P line
  const std::string swapped = "[regions]\nQ = {2.0, 0, 0.5}\nP = {1.0, 0, 0.5}\n";
  CHECK_THAT(error_text(swapped), ContainsSubstring("P must lie strictly after Q"));
  CHECK(error_line(swapped) == 3);
  CHECK_THAT(error_text("[regions]\nQ = {0.1, 0, 0.5}\n"), ContainsSubstring("Q must lie"));
  CHECK(error_line("[regions]\nQ = {0.1, 0, 0.5}\n") == 2);
  CHECK(error_line("[solver]\nT = 2\ndt = 0.3\n") == 3);
  CHECK(error_line("[grid]\n\nn = 3\n") == 3);
  CHECK(error_line("[model]\niota = 1.5\n") == 2);
  CHECK(error_line("[model]\ng_kind = expr\n") == 2);
  CHECK(error_line("[model]\nf_kind = expr\nf_expr = \"u +\"\n") == 3);
  CHECK(error_line("[montecarlo]\neps = 1.5\n") == 2);
  CHECK(error_line("[montecarlo]\ngammas = 1, -2\n") == 2);
  CHECK(error_line("[grid]\nn = 2\n[regions]\nQ = {1, (0, 0, 0), 0.5}\n") == 4);
}

TEST_CASE("printing round-trips", "[config][property]") {
  CHECK(parse_config(print_config(ExperimentSpec{})) == ExperimentSpec{});
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    ExperimentSpec s;
    s.n = U(rng) < 0.5 ? 1 : 2;
    s.nodes = 16 << static_cast<int>(U(rng) * 3);
    s.X = 2.0;
    s.model.lambda_f = U(rng);
    s.model.lambda_g = U(rng) / 3;
    s.model.f_kind = U(rng) < 0.5 ? "linear" : "sine";
    s.model.a_kind = U(rng) < 0.5 ? "random" : "identity";
    s.model.a_seed = static_cast<std::uint64_t>(U(rng) * 1e15);
    s.model.iota = 0.25 + 0.75 * U(rng);
    s.initial.kind = "bump";
    s.initial.width = 0.1 + U(rng);
    s.dt = std::ldexp(1.0, -8 - static_cast<int>(U(rng) * 4));
    s.T = 2.0;
    s.Q = RegionSpec::cylinder(1.0, 0.1 * U(rng), 0.25 + 0.25 * U(rng));
    s.P = RegionSpec{1.5 + 0.1 * U(rng), 2.0, {0.0, 0.1 * U(rng)}, 0.5 * U(rng) + 0.1};
    if (s.n == 1) s.P.center.resize(1);
    s.N = 1 + static_cast<std::size_t>(U(rng) * 5000);
    s.seed = static_cast<std::uint64_t>(U(rng) * 1.8e19);
    s.gammas = {U(rng), 1.0 + U(rng), 3.0};
    s.eps = 0.5 * U(rng) + 1e-3;
    s.jn_mus = {U(rng) + 1e-9};
    s.dir = trial % 3 ? "runs" : "out dir/with # hash";
    s.plot = trial % 2;
    CAPTURE(trial);
    const std::string text = print_config(s);
    const ExperimentSpec back = parse_config(text);
    CHECK(back == s);
    CHECK(print_config(back) == text);
  }
  ExperimentSpec e;
  e.model.g_kind = "expr";
  e.model.g_expr = "0.1 * u * (1 + sin(x))";
  CHECK(parse_config(print_config(e)) == e);
}
