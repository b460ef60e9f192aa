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
/* config.hpp - the experiment configuration file.
 *
 * INI style: `[section]` headers, `key = value` lines, `#` comments.
 * Sections are grid, model, solver, regions, montecarlo and output. Every
 * key has a default; unknown keys are rejected with the closest known key
 * as a hint. Regions are written `{t0, x0, r}` (the cylinder Q_r(t0, x0))
 * or `{t_lo, t_hi, center, radius}`, positionally or as `name = value`
 * items; a 2-d point is `(a, b)` and a scalar point is broadcast.
 */
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cubes.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "model.hpp"
#include "solver.hpp"

namespace harnack {

struct RegionSpec {
  double t_lo = 0.0, t_hi = 1.0;
  std::vector<double> center{0.0};  // one entry broadcasts to every axis
  double radius = 1.0;

  static RegionSpec cylinder(double t0, double x0, double r) {
    return RegionSpec{t0 - r * r, t0, {x0}, r};
  }
  SpaceTimeRect rect(int n) const {
    Point c(n);
    for (int d = 0; d < n; ++d) c[d] = center.size() == 1 ? center[0] : center.at(d);
    return SpaceTimeRect(t_lo, t_hi, Ball(c, radius));
  }
  bool operator==(const RegionSpec&) const = default;
};

// 0, top / count, ..., top
inline std::vector<double> uniform_levels(double top, int count) {
  std::vector<double> v;
  for (int i = 0; i <= count; ++i) v.push_back(top * i / count);
  return v;
}

struct ExperimentSpec {
  // [grid]
  int n = 1;
  int nodes = 128;
  double X = 2.0;
  // [model]
  ModelSpec model;
  InitialSpec initial;
  // [solver]
  double dt = 0.0;  // 0: dt_factor * dx^2
  double dt_factor = 0.5;
  Scheme scheme = Scheme::SemiImplicit;
  double tol = 1e-10;
  int max_iters = 20000;
  double T = 2.0;
  bool record_noise = true;
  // [regions]
  RegionSpec Q = RegionSpec::cylinder(1.0, 0.0, 0.5);
  RegionSpec P = RegionSpec::cylinder(2.0, 0.0, 0.5);
  RegionSpec positivity = RegionSpec::cylinder(2.0, 0.0, 0.5);
  int depth = 0;  // 0: default depth for n
  int division_factor = 4;
  // [montecarlo]
  std::size_t N = 200;
  std::uint64_t seed = 1;
  double a = 0.0;  // 0: median of sup_Q over the ensemble
  std::vector<double> gammas = default_gammas();
  double eps = 0.01;
  double floor = 0.0;
  int validation_samples = 512;
  std::size_t moser_paths = 50;
  double dg_a = 0.0;  // 0: half the sup of each path over [0,1] x B_1
  double dg_eps = 1.0;
  int dg_K = 8;
  double dg_delta = 0.25;
  std::vector<double> jn_mus{1e-2, 1e-4, 1e-6};
  double jn_mu = 1e-2;
  double jn_nu = 0.25;
  std::vector<double> jn_alphas = uniform_levels(1.0, 20);
  int jn_depth = 1;
  // [output]
  std::string dir = "runs";
  bool plot = false;
  bool snapshots = false;
  int snapshot_stride = 64;

  bool operator==(const ExperimentSpec&) const = default;

  Grid grid() const { return Grid(n, nodes, X); }
  double effective_dt() const {
    const double h = 2.0 * X / nodes;
    return dt > 0.0 ? dt : dt_factor * h * h;
  }
  SolverConfig solver() const {
    SolverConfig c;
    c.dt = effective_dt();
    c.scheme = scheme;
    c.tol = tol;
    c.max_iters = max_iters;
    c.record_noise = record_noise;
    return c;
  }
  int cube_depth() const { return depth > 0 ? depth : default_depth(n); }
};

namespace config_detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double to_double(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("'" + key + "' expects a number, got '" + v + "'", line);
}

inline long long to_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ParseError("'" + key + "' expects an integer, got '" + v + "'", line);
}

inline std::uint64_t to_u64(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long d = std::stoull(v, &pos, 0);
      if (trim(v.substr(pos)).empty()) return d;
    }
  } catch (const std::exception&) {
  }
  throw ParseError("'" + key + "' expects an unsigned 64-bit integer, got '" + v + "'", line);
}

inline bool to_bool(const std::string& v, int line, const std::string& key) {
  std::string s = v;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ParseError("'" + key + "' expects true or false, got '" + v + "'", line);
}

inline std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

inline std::string quote(const std::string& v) {
  const bool plain = !v.empty() && v.find('#') == std::string::npos &&
                     v.front() != '"' && !std::isspace(static_cast<unsigned char>(v.front())) &&
                     !std::isspace(static_cast<unsigned char>(v.back()));
  return plain ? v : "\"" + v + "\"";
}

// Splits on commas outside parentheses.
inline std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

inline std::vector<double> to_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  for (const std::string& item : split_top(v)) {
    if (item.empty()) throw ParseError("'" + key + "' has an empty list item", line);
    out.push_back(to_double(item, line, key));
  }
  if (out.empty()) throw ParseError("'" + key + "' expects a non-empty list", line);
  return out;
}

inline std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

inline std::vector<double> to_point(const std::string& v, int line) {
  std::string s = trim(v);
  if (!s.empty() && s.front() == '(') {
    if (s.back() != ')') throw ParseError("unbalanced parentheses in point '" + v + "'", line);
    s = s.substr(1, s.size() - 2);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::vector<double> out;
    std::string tok;
    while (is >> tok) out.push_back(to_double(tok, line, "point"));
    if (out.empty() || out.size() > 2)
      throw ParseError("a point needs 1 or 2 coordinates, got '" + v + "'", line);
    return out;
  }
  return {to_double(s, line, "point")};
}

inline RegionSpec to_region(const std::string& v, int line, const std::string& key) {
  std::string s = trim(v);
  if (s.size() < 2 || s.front() != '{' || s.back() != '}')
    throw ParseError("'" + key + "' expects {t0, x0, r} or {t_lo, t_hi, center, radius}", line);
  const std::vector<std::string> items = split_top(s.substr(1, s.size() - 2));
  std::map<std::string, std::string> named;
  std::vector<std::string> pos;
  for (const std::string& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos) {
      pos.push_back(it);
    } else {
      named[trim(it.substr(0, eq))] = trim(it.substr(eq + 1));
    }
  }
  if (!named.empty() && !pos.empty())
    throw ParseError("'" + key + "' mixes named and positional items", line);
  auto num = [&](const std::string& x) { return to_double(x, line, key); };
  RegionSpec r;
  if (pos.size() == 3 || (named.size() == 3 && named.count("t0") && named.count("x0") &&
                          named.count("r"))) {
    const std::string t0 = pos.empty() ? named["t0"] : pos[0];
    const std::string x0 = pos.empty() ? named["x0"] : pos[1];
    const std::string rr = pos.empty() ? named["r"] : pos[2];
    const double rad = num(rr);
    if (!(rad > 0.0)) throw ParseError("'" + key + "' needs r > 0", line);
    r = RegionSpec{num(t0) - rad * rad, num(t0), to_point(x0, line), rad};
  } else if (pos.size() == 4 ||
             (named.size() == 4 && named.count("t_lo") && named.count("t_hi") &&
              named.count("center") && named.count("radius"))) {
    const bool p = !pos.empty();
    r = RegionSpec{num(p ? pos[0] : named["t_lo"]), num(p ? pos[1] : named["t_hi"]),
                   to_point(p ? pos[2] : named["center"], line),
                   num(p ? pos[3] : named["radius"])};
    if (!(r.radius > 0.0)) throw ParseError("'" + key + "' needs radius > 0", line);
    if (!(r.t_lo < r.t_hi)) throw ParseError("'" + key + "' needs t_lo < t_hi", line);
  } else {
    throw ParseError("'" + key + "' expects {t0, x0, r} or {t_lo, t_hi, center, radius}",
                     line);
  }
  return r;
}

inline std::string region_str(const RegionSpec& r) {
  std::string c;
  if (r.center.size() == 1) {
    c = fmt(r.center[0]);
  } else {
    c = "(" + fmt(r.center[0]) + ", " + fmt(r.center[1]) + ")";
  }
  return "{t_lo = " + fmt(r.t_lo) + ", t_hi = " + fmt(r.t_hi) + ", center = " + c +
         ", radius = " + fmt(r.radius) + "}";
}

inline int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

struct Key {
  std::string section, name;
  std::function<void(ExperimentSpec&, const std::string&, int)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

// clang-format off
#define HL_DBL(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int l) { s.field = to_double(v, l, key); }, \
      [](const ExperimentSpec& s) { return fmt(s.field); }}
#define HL_INT(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int l) { s.field = static_cast<decltype(s.field)>(to_int(v, l, key)); }, \
      [](const ExperimentSpec& s) { return std::to_string(s.field); }}
#define HL_U64(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int l) { s.field = static_cast<decltype(s.field)>(to_u64(v, l, key)); }, \
      [](const ExperimentSpec& s) { return std::to_string(s.field); }}
#define HL_BOOL(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int l) { s.field = to_bool(v, l, key); }, \
      [](const ExperimentSpec& s) { return std::string(s.field ? "true" : "false"); }}
#define HL_STR(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int) { s.field = unquote(v); }, \
      [](const ExperimentSpec& s) { return quote(s.field); }}
#define HL_LIST(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int l) { s.field = to_list(v, l, key); }, \
      [](const ExperimentSpec& s) { return list_str(s.field); }}
#define HL_REGION(sec, key, field) \
  Key{sec, key, [](ExperimentSpec& s, const std::string& v, int l) { s.field = to_region(v, l, key); }, \
      [](const ExperimentSpec& s) { return region_str(s.field); }}
// clang-format on

inline const std::vector<Key>& keys() {
  static const std::vector<Key> k{
      HL_INT("grid", "n", n),
      HL_INT("grid", "nodes", nodes),
      HL_DBL("grid", "X", X),
      HL_STR("model", "a_kind", model.a_kind),
      HL_DBL("model", "a0", model.a0),
      HL_STR("model", "a_expr", model.a_expr),
      HL_U64("model", "a_seed", model.a_seed),
      HL_INT("model", "a_modes", model.a_modes),
      HL_STR("model", "f_kind", model.f_kind),
      HL_DBL("model", "lambda_f", model.lambda_f),
      HL_DBL("model", "f0", model.f0),
      HL_STR("model", "f_expr", model.f_expr),
      HL_STR("model", "g_kind", model.g_kind),
      HL_DBL("model", "lambda_g", model.lambda_g),
      HL_STR("model", "g_expr", model.g_expr),
      HL_INT("model", "m", model.m),
      HL_DBL("model", "iota", model.iota),
      HL_DBL("model", "Lambda", model.Lambda),
      HL_BOOL("model", "check_bounds", model.check_bounds),
      HL_STR("model", "u0_kind", initial.kind),
      HL_DBL("model", "u0_amplitude", initial.amplitude),
      HL_DBL("model", "u0_width", initial.width),
      HL_DBL("model", "u0_center", initial.center),
      HL_STR("model", "u0_expr", initial.expr),
      HL_DBL("solver", "dt", dt),
      HL_DBL("solver", "dt_factor", dt_factor),
      Key{"solver", "scheme",
          [](ExperimentSpec& s, const std::string& v, int l) {
            const std::string u = unquote(v);
            if (u == "semi-implicit") s.scheme = Scheme::SemiImplicit;
            else if (u == "explicit") s.scheme = Scheme::Explicit;
            else throw ParseError("'scheme' must be semi-implicit or explicit, got '" + v + "'", l);
          },
          [](const ExperimentSpec& s) { return to_string(s.scheme); }},
      HL_DBL("solver", "tol", tol),
      HL_INT("solver", "max_iters", max_iters),
      HL_DBL("solver", "T", T),
      HL_BOOL("solver", "record_noise", record_noise),
      HL_REGION("regions", "Q", Q),
      HL_REGION("regions", "P", P),
      HL_REGION("regions", "positivity", positivity),
      HL_INT("regions", "depth", depth),
      HL_INT("regions", "division_factor", division_factor),
      HL_U64("montecarlo", "N", N),
      HL_U64("montecarlo", "seed", seed),
      HL_DBL("montecarlo", "a", a),
      HL_LIST("montecarlo", "gammas", gammas),
      HL_DBL("montecarlo", "eps", eps),
      HL_DBL("montecarlo", "floor", floor),
      HL_INT("montecarlo", "validation_samples", validation_samples),
      HL_U64("montecarlo", "moser_paths", moser_paths),
      HL_DBL("montecarlo", "dg_a", dg_a),
      HL_DBL("montecarlo", "dg_eps", dg_eps),
      HL_INT("montecarlo", "dg_K", dg_K),
      HL_DBL("montecarlo", "dg_delta", dg_delta),
      HL_LIST("montecarlo", "jn_mus", jn_mus),
      HL_DBL("montecarlo", "jn_mu", jn_mu),
      HL_DBL("montecarlo", "jn_nu", jn_nu),
      HL_LIST("montecarlo", "jn_alphas", jn_alphas),
      HL_INT("montecarlo", "jn_depth", jn_depth),
      HL_STR("output", "dir", dir),
      HL_BOOL("output", "plot", plot),
      HL_BOOL("output", "snapshots", snapshots),
      HL_INT("output", "snapshot_stride", snapshot_stride),
  };
  return k;
}

#undef HL_DBL
#undef HL_INT
#undef HL_U64
#undef HL_BOOL
#undef HL_STR
#undef HL_LIST
#undef HL_REGION

inline const std::vector<std::string>& sections() {
  static const std::vector<std::string> s{"grid", "model", "solver", "regions", "montecarlo",
                                          "output"};
  return s;
}

inline std::string suggestion(const std::string& section, const std::string& key) {
  for (const Key& k : keys())
    if (k.name == key && k.section != section) return " (it belongs in [" + k.section + "])";
  int best = 1 << 20;
  std::string name;
  for (const Key& k : keys()) {
    if (k.section != section) continue;
    const int d = levenshtein(key, k.name);
    if (d < best) {
      best = d;
      name = k.name;
    }
  }
  if (best <= 2 && !name.empty()) return "; did you mean '" + name + "'?";
  return "";
}

}  // namespace config_detail

// Line numbers of the keys that cross-field validation reports against.
struct ConfigLines {
  std::map<std::string, int> at;  // "section.key" -> line
  int of(const std::string& k) const {
    const auto it = at.find(k);
    return it == at.end() ? 0 : it->second;
  }
};

// Cross-field checks. Errors carry the line of the offending key.
inline void validate_spec(const ExperimentSpec& s, const ConfigLines& L = {}) {
  auto fail = [&](const std::string& what, const std::string& key) {
    throw ParseError(what, L.of(key));
  };
  if (s.n != 1 && s.n != 2) fail("grid dimension n must be 1 or 2", "grid.n");
  if (s.nodes < 4) fail("grid needs at least 4 nodes per axis", "grid.nodes");
  if (!(s.X > 0.0)) fail("grid half width X must be positive", "grid.X");
  if (!(s.T > 0.0)) fail("horizon T must be positive", "solver.T");
  if (!(s.effective_dt() > 0.0)) fail("time step must be positive", "solver.dt_factor");
  try {
    step_count(s.T, s.effective_dt());
  } catch (const InvalidArgument&) {
    fail("horizon T = " + config_detail::fmt(s.T) + " is not a multiple of dt = " +
             config_detail::fmt(s.effective_dt()),
         s.dt > 0.0 ? "solver.dt" : "solver.T");
  }
  if (!(s.tol > 0.0)) fail("solver tolerance must be positive", "solver.tol");
  if (s.max_iters < 1) fail("max_iters must be at least 1", "solver.max_iters");
  if (s.model.m < 0) fail("noise channel count m must be nonnegative", "model.m");
  if (!(s.model.iota > 0.0 && s.model.iota <= 1.0)) fail("iota must lie in (0, 1]", "model.iota");
  if (s.model.a_kind == "expr" && s.model.a_expr.empty())
    fail("a_kind = expr needs a_expr", "model.a_kind");
  if (s.model.f_kind == "expr" && s.model.f_expr.empty())
    fail("f_kind = expr needs f_expr", "model.f_kind");
  if (s.model.g_kind == "expr" && s.model.g_expr.empty())
    fail("g_kind = expr needs g_expr", "model.g_kind");
  if (s.initial.kind == "expr" && s.initial.expr.empty())
    fail("u0_kind = expr needs u0_expr", "model.u0_kind");
  for (const char* k : {"P", "Q", "positivity"}) {
    const RegionSpec& r = std::string(k) == "P" ? s.P : std::string(k) == "Q" ? s.Q : s.positivity;
    if (r.center.size() != 1 && static_cast<int>(r.center.size()) != s.n)
      fail(std::string("region ") + k + " has a center of the wrong dimension",
           std::string("regions.") + k);
  }
  const Grid g = s.grid();
  try {
    validate_harnack_geometry(s.P.rect(s.n), s.Q.rect(s.n), g, 0.0, s.T);
  } catch (const InvalidArgument& e) {
    const std::string w = e.what();
    fail(w, w.rfind("Q", 0) == 0 ? "regions.Q" : "regions.P");
  }
  if (s.depth < 0) fail("cube depth must be nonnegative", "regions.depth");
  if (s.division_factor < 2) fail("division_factor must be at least 2", "regions.division_factor");
  if (s.N < 1) fail("need N >= 1 paths", "montecarlo.N");
  for (double G : s.gammas)
    if (!(G >= 0.0)) fail("gammas must be nonnegative", "montecarlo.gammas");
  if (!(s.eps > 0.0 && s.eps < 1.0)) fail("eps must lie in (0, 1)", "montecarlo.eps");
  if (!(s.floor >= 0.0)) fail("floor must be nonnegative", "montecarlo.floor");
  if (!(s.dg_eps > 0.0 && s.dg_eps <= 1.0)) fail("dg_eps must lie in (0, 1]", "montecarlo.dg_eps");
  if (s.dg_K < 1) fail("dg_K must be at least 1", "montecarlo.dg_K");
  if (!(s.dg_delta > 0.0)) fail("dg_delta must be positive", "montecarlo.dg_delta");
  for (double m : s.jn_mus)
    if (!(m > 0.0)) fail("jn_mus must be positive", "montecarlo.jn_mus");
  if (!(s.jn_mu > 0.0)) fail("jn_mu must be positive", "montecarlo.jn_mu");
  if (!(s.jn_nu > 0.0)) fail("jn_nu must be positive", "montecarlo.jn_nu");
  if (s.jn_depth < 0) fail("jn_depth must be nonnegative", "montecarlo.jn_depth");
  if (s.snapshot_stride < 1) fail("snapshot_stride must be at least 1", "output.snapshot_stride");
  // Each expression is parsed on its own so errors point at its line.
  auto parse_at = [&](const std::string& src, const std::string& key) {
    if (src.empty()) return;
    try {
      parse_expression_list(src);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), L.of(key));
    }
  };
  parse_at(s.model.a_expr, "model.a_expr");
  parse_at(s.model.f_expr, "model.f_expr");
  parse_at(s.model.g_expr, "model.g_expr");
  parse_at(s.initial.expr, "model.u0_expr");
  try {
    make_model(s.model, s.n, s.X);
  } catch (const ParseError& e) {
    throw ParseError(e.what(), L.of("model.a_kind"));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), L.of("model.a_kind"));
  }
}

inline ExperimentSpec parse_config(const std::string& text, ConfigLines* lines_out = nullptr) {
  using namespace config_detail;
  ExperimentSpec s;
  ConfigLines L;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string t = raw;
    // '#' starts a comment unless it sits inside double quotes
    bool q = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == '"') q = !q;
      if (t[i] == '#' && !q) {
        t.resize(i);
        break;
      }
    }
    t = trim(t);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("malformed section header '" + t + "'", line);
      section = trim(t.substr(1, t.size() - 2));
      if (std::find(sections().begin(), sections().end(), section) == sections().end())
        throw ParseError("unknown section [" + section + "]", line);
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value', got '" + t + "'", line);
    if (section.empty()) throw ParseError("key outside of any section", line);
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    const Key* k = nullptr;
    for (const Key& c : keys())
      if (c.section == section && c.name == key) k = &c;
    if (!k)
      throw ParseError("unknown key '" + key + "' in [" + section + "]" + suggestion(section, key),
                       line);
    const std::string id = section + "." + key;
    if (L.at.count(id)) throw ParseError("duplicate key '" + key + "'", line);
    L.at[id] = line;
    if (val.empty() && key.find("expr") == std::string::npos)
      throw ParseError("missing value for '" + key + "'", line);
    k->set(s, val, line);
  }
  validate_spec(s, L);
  if (lines_out) *lines_out = L;
  return s;
}

// Canonical text; parse_config(print_config(s)) == s.
inline std::string print_config(const ExperimentSpec& s) {
  using namespace config_detail;
  std::string out;
  for (const std::string& sec : sections()) {
    out += "[" + sec + "]\n";
    for (const Key& k : keys())
      if (k.section == sec) {
        const std::string v = k.get(s);
        if (v.empty() || v == "\"\"") continue;  // empty strings are the default
        out += k.name + " = " + v + "\n";
      }
    out += "\n";
  }
  return out;
}

}  // namespace harnack
