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
/* run.hpp - subcommand dispatch and run persistence.
 *
 * A run parses the config, creates <out>/<UTC timestamp>_seed<seed>/,
 * writes its CSV (and optional SVG) results there and finishes with an
 * atomically written manifest.json holding the verbatim config, the
 * effective seed and overrides, the result list and the failure roster.
 * Feeding that manifest back as the config reproduces every result file.
 * Exit status: 0 ok, 2 validation failure, 3 numeric failure.
 */
#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "cubes.hpp"
#include "degiorgi.hpp"
#include "ensemble.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "jn.hpp"

namespace harnack {

inline constexpr const char* kVersion = "0.1.0";

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"solve", "ensemble", "harnack", "positivity", "moser",
                                          "degiorgi", "jn", "cubes", "norms"};
  return s;
}

struct RunOptions {
  std::string command;
  std::string config_text;
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::optional<std::string> out;
  bool plot = false;
  std::optional<int> depth;
  std::optional<std::filesystem::path> run_dir;  // use exactly this directory
};

struct RunResult {
  int status = 0;
  std::filesystem::path dir;
  std::vector<std::string> files;
  std::string message;
};

inline bool looks_like_manifest(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{';
  }
  return false;
}

// Options that replay a manifest. Explicit command/seed/out/threads in
// `base` win over the recorded ones.
inline RunOptions options_from_manifest(const std::string& text, RunOptions base = {}) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 0);
  }
  if (!j.contains("config") || !j.contains("master_seed") || !j.contains("subcommand"))
    throw ParseError("manifest lacks config, master_seed or subcommand", 0);
  base.config_text = j["config"].get<std::string>();
  if (base.command.empty()) base.command = j["subcommand"].get<std::string>();
  if (!base.seed) base.seed = j["master_seed"].get<std::uint64_t>();
  if (j.contains("overrides")) {
    const auto& o = j["overrides"];
    if (o.contains("depth") && !o["depth"].is_null() && !base.depth)
      base.depth = o["depth"].get<int>();
    if (o.contains("plot") && o["plot"].get<bool>()) base.plot = true;
  }
  return base;
}

namespace run_detail {

inline std::string utc_now(const char* fmt) {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::strftime(buf, sizeof buf, fmt, &tm);
  return buf;
}

struct Context {
  ExperimentSpec spec;
  RunOptions opt;
  std::filesystem::path dir;
  std::vector<std::string> files;
  std::vector<PathFailure> failures;
  std::string message;
  bool invalid = false;

  void write(const std::string& name, const std::string& content) {
    const std::filesystem::path p = dir / name;
    std::filesystem::create_directories(p.parent_path());
    write_atomic(p, content);
    files.push_back(name);
  }
  void write(const std::string& name, const CsvTable& t) { write(name, t.str()); }
  bool plot() const { return opt.plot || spec.plot; }
};

inline CoefficientModel model_of(const ExperimentSpec& s) { return make_model(s.model, s.n, s.X); }

inline std::function<FieldSnapshot(std::size_t)> initial_of(const ExperimentSpec& s) {
  const Grid g = s.grid();
  if (s.initial.kind == "bumps") {
    const InitialSpec is = s.initial;
    const std::uint64_t seed = s.seed;
    return [g, is, seed](std::size_t i) {
      return make_initial(g, is, path_seed(seed ^ 0x5eedULL, i));
    };
  }
  const FieldSnapshot u0 = make_initial(g, s.initial);
  return [u0](std::size_t) { return u0; };
}

inline EnsembleSpec ensemble_of(const Context& c, const CoefficientModel& cm, std::size_t N) {
  EnsembleSpec e;
  e.grid = c.spec.grid();
  e.model = cm;
  e.solver = c.spec.solver();
  e.initial = initial_of(c.spec);
  e.T = c.spec.T;
  e.N = N;
  e.master_seed = c.spec.seed;
  e.threads = std::max(1, c.opt.threads);
  e.validate = c.spec.model.check_bounds;
  e.validation_samples = c.spec.validation_samples;
  return e;
}

template <class S>
void record(Context& c, const Ensemble<S>& ens) {
  c.failures = ens.failures;
  if (!ens.failures.empty()) {
    CsvTable t({"index", "step", "what"});
    for (const PathFailure& f : ens.failures)
      t.row({std::to_string(f.index), std::to_string(f.step), "\"" + f.what + "\""});
    c.write("failures.csv", t);
  }
  if (!ens.valid()) {
    c.invalid = true;
    c.message += "run invalid: " + std::to_string(ens.failures.size()) + " of " +
                 std::to_string(ens.N) + " paths failed; ";
  }
}

inline CsvTable kv_table(const std::vector<std::pair<std::string, std::string>>& kv) {
  CsvTable t({"key", "value"});
  for (const auto& [k, v] : kv) t.row({k, v});
  return t;
}

// ------------------------------------------------------------ commands

inline void cmd_solve(Context& c) {
  const ExperimentSpec& s = c.spec;
  const CoefficientModel cm = model_of(s);
  if (s.model.check_bounds) validate_model(cm, s.validation_samples, s.seed, s.X, s.T);
  const FieldSnapshot u0 = initial_of(s)(0);
  const SolverConfig cfg = s.solver();
  const FieldPath path = solve_path(u0, cm, cfg, s.T, path_seed(s.seed, 0));
  const Grid& g = path.grid;
  CsvTable series({"j", "t", "mass", "min", "max", "l2_energy", "neg_energy"});
  for (std::size_t j = 0; j < path.samples(); ++j) {
    const double* u = path.snap(j);
    double mass = 0, lo = kInf, hi = -kInf;
    for (std::size_t k = 0; k < g.size(); ++k) {
      mass += u[k];
      lo = std::min(lo, u[k]);
      hi = std::max(hi, u[k]);
    }
    series.row({std::to_string(j), num(path.time(j)), num(mass * g.cell_volume()), num(lo),
                num(hi), num(l2_energy({u, g.size()}, g)), num(neg_part_energy({u, g.size()}, g))});
  }
  c.write("solve_series.csv", series);
  c.write("snapshot_final.csv", snapshot_table(path.snapshot(path.axis.steps)));
  if (s.snapshots)
    for (std::size_t j = 0; j < path.samples(); j += s.snapshot_stride) {
      char name[64];
      std::snprintf(name, sizeof name, "snapshots/snapshot_%06zu.csv", j);
      c.write(name, snapshot_table(path.snapshot(j)));
    }
  // Heat benchmark shape: convergence against the closed form.
  const bool heat = cm.deterministic() && s.model.a_kind == "identity" && s.model.a0 == 1.0 &&
                    s.model.f_kind == "zero" && s.model.f0 == 0.0 &&
                    s.initial.kind == "gaussian" && s.initial.center == 0.0;
  if (heat) {
    CsvTable t({"nodes", "dx", "dt", "l2_error", "ratio"});
    std::vector<HeatRow> rows;
    for (int N : {s.nodes / 2, s.nodes, 2 * s.nodes}) {
      if (N < 4) continue;
      rows.push_back(heat_error(s.n, N, s.T, s.initial.width, s.dt_factor));
      if (rows.size() > 1) rows.back().ratio = rows[rows.size() - 2].error / rows.back().error;
    }
    for (const HeatRow& r : rows)
      t.row({std::to_string(r.N), num(r.dx), num(r.dt), num(s.initial.amplitude * r.error),
             rows.size() > 1 && r.ratio > 0 ? num(r.ratio) : ""});
    c.write("convergence.csv", t);
    if (c.plot()) {
      Series se{"L2 error", {}, {}};
      for (const HeatRow& r : rows) {
        se.x.push_back(r.dx);
        se.y.push_back(r.error);
      }
      c.write("convergence.svg", svg_chart("heat benchmark", "dx", "error", {se}, true, true));
    }
  }
  c.message += "solved " + std::to_string(path.axis.steps) + " steps";
}

struct PathSummary {
  std::uint64_t seed;
  double sup_Q, inf_P, min_u, max_u, mass_T;
};

inline void cmd_ensemble(Context& c) {
  const ExperimentSpec& s = c.spec;
  const SpaceTimeRect P = s.P.rect(s.n), Q = s.Q.rect(s.n);
  const CoefficientModel cm = model_of(s);
  const auto ens = run_ensemble(ensemble_of(c, cm, s.N), [&](const FieldPath& p, std::size_t) {
    double lo = kInf, hi = -kInf, mass = 0;
    for (double v : p.u) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double* uT = p.snap(p.axis.steps);
    for (std::size_t k = 0; k < p.nodes(); ++k) mass += uT[k];
    return PathSummary{p.seed, sup_on(p, Q), inf_on(p, P), lo, hi, mass * p.grid.cell_volume()};
  });
  CsvTable t({"index", "seed", "sup_Q", "inf_P", "min_u", "max_u", "mass_T"});
  ens.for_each([&](std::size_t i, const PathSummary& r) {
    t.row({std::to_string(i), std::to_string(r.seed), num(r.sup_Q), num(r.inf_P), num(r.min_u),
           num(r.max_u), num(r.mass_T)});
  });
  c.write("ensemble.csv", t);
  record(c, ens);
  c.message += std::to_string(ens.successes()) + " paths";
}

inline void cmd_harnack(Context& c) {
  const ExperimentSpec& s = c.spec;
  const SpaceTimeRect P = s.P.rect(s.n), Q = s.Q.rect(s.n);
  validate_harnack_geometry(P, Q, s.grid(), 0.0, s.T);
  const CoefficientModel cm = model_of(s);
  const auto ens = run_ensemble(ensemble_of(c, cm, s.N), [&](const FieldPath& p, std::size_t) {
    return summarize_harnack(p, P, Q);
  });
  record(c, ens);
  std::vector<double> sups;
  ens.for_each([&](std::size_t, const HarnackSummary& h) { sups.push_back(h.sup_Q); });
  const double a = s.a > 0.0 ? s.a : median(sups);
  const auto curve = harnack_curve(ens, a, s.gammas);
  CsvTable t({"gamma", "hits", "N", "p_hat", "ci_lo", "ci_hi"});
  for (const HarnackPoint& hp : curve)
    t.row({num(hp.gamma), std::to_string(hp.est.hits), std::to_string(hp.est.trials),
           num(hp.est.p_hat), num(hp.est.ci_lo), num(hp.est.ci_hi)});
  c.write("harnack_curve.csv", t);
  CsvTable paths({"index", "sup_Q", "inf_P"});
  ens.for_each([&](std::size_t i, const HarnackSummary& h) {
    paths.row({std::to_string(i), num(h.sup_Q), num(h.inf_P)});
  });
  c.write("harnack_paths.csv", paths);
  const auto g0 = gamma_below(curve, s.eps);
  const std::size_t mono = indicator_monotone_violations(ens, a, s.gammas);
  c.write("harnack_summary.csv",
          kv_table({{"a", num(a)},
                    {"paths", std::to_string(ens.successes())},
                    {"failures", std::to_string(ens.failures.size())},
                    {"eps", num(s.eps)},
                    {"gamma_below_eps", g0 ? num(*g0) : "none"},
                    {"monotone_violations", std::to_string(mono)},
                    {"valid", ens.valid() ? "true" : "false"}}));
  if (c.plot()) {
    Series p{"p_hat", {}, {}}, hi{"ci_hi", {}, {}};
    for (const HarnackPoint& hp : curve) {
      p.x.push_back(hp.gamma);
      p.y.push_back(hp.est.p_hat);
      hi.x.push_back(hp.gamma);
      hi.y.push_back(hp.est.ci_hi);
    }
    c.write("harnack_curve.svg", svg_chart("joint tail vs gamma", "gamma", "probability",
                                           {p, hi}, true, false));
  }
  c.message += "a = " + num(a) + ", p_hat(" + num(curve.back().gamma) +
               ") = " + num(curve.back().est.p_hat);
}

inline void cmd_positivity(Context& c) {
  const ExperimentSpec& s = c.spec;
  const SpaceTimeRect R = s.positivity.rect(s.n);
  const CoefficientModel cm = model_of(s);
  EnsembleSpec es = ensemble_of(c, cm, s.N);
  validate_positive_initial(es.initial(0));
  if (s.initial.kind == "bumps") {
    const auto base = es.initial;
    es.initial = [base](std::size_t i) {
      FieldSnapshot u = base(i);
      validate_positive_initial(u);
      return u;
    };
  }
  const auto ens = run_ensemble(es, [&](const FieldPath& p, std::size_t) {
    return summarize_positivity(p, R, s.tol);
  });
  record(c, ens);
  CsvTable t({"index", "min_region", "max_neg_energy", "initial_energy", "negative_samples"});
  ens.for_each([&](std::size_t i, const PositivitySummary& r) {
    t.row({std::to_string(i), num(r.min_region), num(r.max_neg_energy), num(r.initial_energy),
           std::to_string(r.negative)});
  });
  c.write("positivity.csv", t);
  const PositivityReport rep = positivity_report(ens, s.floor);
  c.write("positivity_summary.csv",
          kv_table({{"paths", std::to_string(rep.paths)},
                    {"floor", num(s.floor)},
                    {"at_or_below_floor", std::to_string(rep.at_or_below_floor)},
                    {"min_of_mins", num(rep.min_of_mins)},
                    {"max_neg_energy", num(rep.max_neg_energy)},
                    {"initial_energy", num(rep.initial_energy)},
                    {"negative_fraction", num(rep.negative_fraction)}}));
  c.message += std::to_string(rep.at_or_below_floor) + " of " + std::to_string(rep.paths) +
               " paths at or below the floor";
}

// The Moser oracle drops f and g from the configured model.
inline ModelSpec deterministic_of(ModelSpec m) {
  m.f_kind = "zero";
  m.lambda_f = 0.0;
  m.f0 = 0.0;
  m.g_kind = "zero";
  m.lambda_g = 0.0;
  m.m = 0;
  return m;
}

struct MoserPair {
  MoserResult coarse, fine;
};

inline void cmd_moser(Context& c) {
  ExperimentSpec s = c.spec;
  s.model = deterministic_of(s.model);
  if (s.initial.kind != "bumps") s.initial.kind = "bumps";
  const SpaceTimeRect P = s.P.rect(s.n), Q = s.Q.rect(s.n);
  const CoefficientModel cm = model_of(s);
  ExperimentSpec sf = s;
  sf.nodes = 2 * s.nodes;
  sf.dt = s.effective_dt() / 4.0;
  const SolverConfig cfg_f = sf.solver();
  const auto init_f = initial_of(sf);
  const auto ens = run_ensemble(ensemble_of(c, cm, s.moser_paths),
                                [&](const FieldPath& p, std::size_t i) {
                                  const FieldPath pf = solve_path(init_f(i), cm, cfg_f, s.T, 0);
                                  return MoserPair{moser_ratio(p, cm, P, Q),
                                                   moser_ratio(pf, cm, P, Q)};
                                });
  record(c, ens);
  CsvTable t({"index", "sup_Q", "inf_P", "ratio", "ratio_refined", "diagnostic"});
  double mc = 0, mf = 0;
  bool finite = true;
  ens.for_each([&](std::size_t i, const MoserPair& r) {
    t.row({std::to_string(i), num(r.coarse.sup_Q), num(r.coarse.inf_P), num(r.coarse.ratio),
           num(r.fine.ratio), r.coarse.diagnostic});
    mc = std::max(mc, r.coarse.ratio);
    mf = std::max(mf, r.fine.ratio);
    finite = finite && std::isfinite(r.coarse.ratio) && std::isfinite(r.fine.ratio);
  });
  c.write("moser.csv", t);
  const double change = std::abs(mf - mc) / mc;
  c.write("moser_summary.csv", kv_table({{"paths", std::to_string(ens.successes())},
                                         {"all_finite", finite ? "true" : "false"},
                                         {"max_ratio", num(mc)},
                                         {"max_ratio_refined", num(mf)},
                                         {"relative_change", num(change)}}));
  c.message += "max ratio " + num(mc) + " (refined " + num(mf) + ")";
}

inline void cmd_degiorgi(Context& c) {
  const ExperimentSpec& s = c.spec;
  require(s.T >= 1.0, "degiorgi needs T >= 1 to cover [0, 1] x B_1");
  const CoefficientModel cm = model_of(s);
  const CutoffFamily fam{s.n};
  const SpaceTimeRect Q1(0.0, 1.0, Ball(Point::origin(s.n), 1.0));
  struct Out {
    double a;
    IterationTrace tr;
  };
  const auto ens = run_ensemble(ensemble_of(c, cm, s.N), [&](const FieldPath& p, std::size_t) {
    IterationParams ip;
    ip.a = s.dg_a > 0.0 ? s.dg_a : 0.5 * sup_on(p, Q1);
    ip.eps = s.dg_eps;
    ip.K = s.dg_K;
    ip.delta = s.dg_delta;
    require(ip.a > 0.0, "degiorgi level a must be positive (sup of u on Q_1 is not)");
    return Out{ip.a, iteration_trace(p, cm, fam, ip)};
  });
  record(c, ens);
  CsvTable tr({"path", "k", "U", "X_star", "qv_bound", "C_hat", "log_ratio"});
  CsvTable sm({"path", "a", "C_hat", "fitted_rate", "decays", "reaches_zero"});
  std::vector<double> chat;
  std::size_t finite = 0;
  ens.for_each([&](std::size_t i, const Out& o) {
    for (const TraceRow& r : o.tr.rows)
      tr.row({std::to_string(i), std::to_string(r.k), num(r.U), num(r.X), num(r.qv_bound),
              num(r.C_hat), num(r.log_ratio)});
    sm.row({std::to_string(i), num(o.a), num(o.tr.C_hat), num(o.tr.fitted_rate),
            o.tr.decays ? "true" : "false", o.tr.reaches_zero ? "true" : "false"});
    chat.push_back(o.tr.C_hat);
    if (std::isfinite(o.tr.C_hat)) ++finite;
  });
  c.write("degiorgi_trace.csv", tr);
  c.write("degiorgi_summary.csv", sm);
  c.write("degiorgi_stats.csv",
          kv_table({{"paths", std::to_string(chat.size())},
                    {"finite_fraction", num(static_cast<double>(finite) / chat.size())},
                    {"C_hat_median", num(median(chat))},
                    {"C_hat_p90", num(percentile(chat, 0.9))},
                    {"C_hat_max", num(*std::max_element(chat.begin(), chat.end()))}}));
  c.message += "C_hat median " + num(median(chat));
}

struct JNSummary {
  LevelSetFractions ls;
  std::vector<double> F;  // F^{1/nu} per mu
  std::vector<double> plus, minus, qv;
};

inline void cmd_jn(Context& c) {
  const ExperimentSpec& s = c.spec;
  require(s.T >= 2.0, "jn needs T >= 2 to cover the root cube (0, 2) x B_1/2");
  const CoefficientModel cm = model_of(s);
  const Cube root = root_cube(s.n);
  CubeParams cp;
  cp.zeta = s.division_factor;
  const CubeHierarchy h = build_Cprime(root, s.jn_depth, cp);
  std::vector<Cube> cubes;
  std::vector<std::pair<int, std::size_t>> ids;
  for (int j = 0; j <= h.depth; ++j)
    for (std::size_t i = 0; i < h.Cprime[j].size(); ++i) {
      cubes.push_back(h.cube(h.Cprime[j][i], j));
      ids.push_back({j, i});
    }
  const SubcubeSet sc = subcubes(root);
  const auto ens = run_ensemble(ensemble_of(c, cm, s.N), [&](const FieldPath& p, std::size_t) {
    JNSummary out;
    const JNContext ctx(p, cm, s.jn_mu);
    out.ls = levelset_fractions(ctx.fwd, root, s.jn_alphas);
    for (double mu : s.jn_mus) out.F.push_back(F_root(p, mu, s.jn_nu, sc.d_plus, sc.d_minus));
    for (const Cube& cb : cubes) {
      const CubeStats st = local_bmo_check(ctx, cb);
      out.plus.push_back(st.plus_avg);
      out.minus.push_back(st.minus_avg);
      out.qv.push_back(st.M_series.qv_ratio);
    }
    return out;
  });
  record(c, ens);
  const std::vector<JNSummary> all = ens.collect();
  require(!all.empty(), "jn needs at least one successful path");
  {
    CsvTable t({"level", "index", "lineage", "l", "w1", "a_C", "plus_avg", "minus_avg",
                "qv_ratio"});
    const FieldPath p0 = solve_path(initial_of(s)(0), cm, s.solver(), s.T, path_seed(s.seed, 0));
    const JNContext ctx(p0, cm, s.jn_mu);
    for (std::size_t q = 0; q < cubes.size(); ++q) {
      const CubeStats st = local_bmo_check(ctx, cubes[q]);
      t.row({std::to_string(ids[q].first), std::to_string(ids[q].second),
             to_string(cubes[q].lineage), num(cubes[q].l), num(cubes[q].w[0]), num(st.a_C),
             num(st.plus_avg), num(st.minus_avg), num(st.M_series.qv_ratio)});
    }
    c.write("jn_cubes.csv", t);
  }
  std::vector<double> mp, mm;
  CsvTable ls({"alpha", "median_plus", "median_minus"});
  for (std::size_t i = 0; i < s.jn_alphas.size(); ++i) {
    std::vector<double> p, m;
    for (const JNSummary& r : all) {
      p.push_back(r.ls.plus[i]);
      m.push_back(r.ls.minus[i]);
    }
    mp.push_back(median(p));
    mm.push_back(median(m));
    ls.row({num(s.jn_alphas[i]), num(mp.back()), num(mm.back())});
  }
  c.write("jn_levelset.csv", ls);
  CsvTable fit({"side", "B", "b", "r2", "points"});
  for (int side = 0; side < 2; ++side) {
    const char* name = side == 0 ? "plus" : "minus";
    try {
      const DecayFit f = fit_decay(s.jn_alphas, side == 0 ? mp : mm);
      fit.row({name, num(f.B), num(f.b), num(f.r2), std::to_string(f.points)});
    } catch (const InsufficientData&) {
      fit.row({name, "nan", "nan", "nan", "0"});
    }
  }
  c.write("jn_fit.csv", fit);
  std::vector<std::vector<double>> vals(s.jn_mus.size());
  for (const JNSummary& r : all)
    for (std::size_t i = 0; i < s.jn_mus.size(); ++i) vals[i].push_back(r.F[i]);
  const ReverseCSTail rc = reverse_cs_tail(s.jn_mus, vals);
  CsvTable rt({"mu", "eps", "K_hat"});
  for (const ReverseCSRow& r : rc.rows) rt.row({num(r.mu), num(r.eps), num(r.K_hat)});
  c.write("jn_reverse_cs.csv", rt);
  std::vector<double> plus_all, qv_all;
  for (const JNSummary& r : all) {
    plus_all.insert(plus_all.end(), r.plus.begin(), r.plus.end());
    qv_all.insert(qv_all.end(), r.qv.begin(), r.qv.end());
  }
  const std::vector<double> eps_list{0.1, 0.05, 0.01};
  std::vector<std::pair<std::string, std::string>> kv{
      {"A_hat_p99_plus_avg", num(percentile(plus_all, 0.99))},
      {"J_hat_max_qv_ratio", num(*std::max_element(qv_all.begin(), qv_all.end()))},
      {"mu_stable", rc.mu_stable ? "true" : "false"}};
  for (std::size_t i = 0; i < eps_list.size(); ++i)
    kv.push_back({"variation_eps_" + num(eps_list[i]), num(rc.variation[i])});
  c.write("jn_summary.csv", kv_table(kv));
  c.message += std::string("mu stable: ") + (rc.mu_stable ? "yes" : "no");
}

inline void cmd_cubes(Context& c) {
  const ExperimentSpec& s = c.spec;
  const int depth = c.opt.depth ? *c.opt.depth : s.cube_depth();
  CubeParams cp;
  cp.zeta = s.division_factor;
  const CubeHierarchy h = build_Cprime(root_cube(s.n), depth, cp);
  std::vector<std::string> head{"level", "count_C", "count_Cprime", "recurrence", "bound",
                                "t_lo", "t_hi", "x1_lo", "x1_hi"};
  if (s.n == 2) {
    head.push_back("x2_lo");
    head.push_back("x2_hi");
  }
  CsvTable t(head);
  const double pieces = std::pow(cp.zeta, s.n + 2);
  double x = 1.0;
  for (int j = 0; j <= depth; ++j) {
    if (j > 0) x = 2.0 * pieces * x + std::pow(2.0, j) * std::pow(pieces, j);
    const LevelBox b = level_bounding_box(h, h.Cprime[j], j);
    std::vector<std::string> r{std::to_string(j), std::to_string(count_C_level(h, j)),
                               std::to_string(count_level(h, j)), num(x),
                               num(std::pow(cp.zeta, (s.n + 3.0) * j)), num(b.t_lo),
                               num(b.t_hi), num(b.x_lo[0]), num(b.x_hi[0])};
    if (s.n == 2) {
      r.push_back(num(b.x_lo[1]));
      r.push_back(num(b.x_hi[1]));
    }
    t.row(r);
  }
  c.write("cubes.csv", t);
  c.message += "depth " + std::to_string(depth) + ", " +
               std::to_string(count_level(h, depth)) + " cubes at the last level";
}

inline void cmd_norms(Context& c) {
  const ExperimentSpec& s = c.spec;
  const CoefficientModel cm = model_of(s);
  if (s.model.check_bounds) validate_model(cm, s.validation_samples, s.seed, s.X, s.T);
  const FieldPath p = solve_path(initial_of(s)(0), cm, s.solver(), s.T, path_seed(s.seed, 0));
  std::vector<std::pair<std::string, SpaceTimeRect>> regions{{"Q", s.Q.rect(s.n)},
                                                             {"P", s.P.rect(s.n)}};
  if (s.T >= 1.0) regions.push_back({"Q_1", make_cylinder(1.0, s.n)});
  const std::vector<MixedNormSpec> specs{{1, 1}, {2, 2}, {4, 2}, {2, kInf}, {kInf, kInf}};
  CsvTable t({"region", "quantity", "p", "q", "value"});
  for (const auto& [name, r] : regions) {
    for (const MixedNormSpec& ms : specs)
      t.row({name, "lpq_norm", num(ms.p), num(ms.q), num(lpq_norm(p, ms, r))});
    t.row({name, "sup", "", "", num(sup_on(p, r))});
    t.row({name, "inf", "", "", num(inf_on(p, r))});
  }
  if (s.T >= 2.0) {
    const SubcubeSet sc = subcubes(root_cube(s.n));
    for (double mu : s.jn_mus)
      t.row({"D0", "F_root mu=" + num(mu), num(s.jn_nu), "", num(F_root(p, mu, s.jn_nu,
                                                                         sc.d_plus, sc.d_minus))});
  }
  c.write("norms.csv", t);
  c.message += "norms of one path";
}

inline int status_of(const std::exception_ptr& e, std::string& msg) {
  try {
    std::rethrow_exception(e);
  } catch (const NumericError& x) {
    msg = x.what();
    return 3;
  } catch (const Error& x) {
    msg = x.what();
    return 2;
  } catch (const std::filesystem::filesystem_error& x) {
    msg = x.what();
    return 2;
  } catch (const std::exception& x) {
    msg = x.what();
    return 3;
  }
}

}  // namespace run_detail

inline RunResult dispatch(RunOptions opt) {
  RunResult res;
  ExperimentSpec spec;
  try {
    if (looks_like_manifest(opt.config_text)) opt = options_from_manifest(opt.config_text, opt);
    if (std::find(subcommands().begin(), subcommands().end(), opt.command) == subcommands().end())
      throw InvalidArgument("unknown subcommand '" + opt.command + "'");
    spec = parse_config(opt.config_text);
    if (opt.seed) spec.seed = *opt.seed;
    if (opt.depth) {
      require(*opt.depth >= 0, "depth must be nonnegative");
      spec.depth = *opt.depth;
    }
  } catch (...) {
    res.status = run_detail::status_of(std::current_exception(), res.message);
    return res;
  }
  namespace fs = std::filesystem;
  run_detail::Context ctx{spec, opt, {}, {}, {}, {}, false};
  const std::string started = run_detail::utc_now("%Y-%m-%dT%H:%M:%SZ");
  try {
    if (opt.run_dir) {
      ctx.dir = *opt.run_dir;
    } else {
      const fs::path base = opt.out ? fs::path(*opt.out) : fs::path(spec.dir);
      const std::string stem =
          run_detail::utc_now("%Y%m%dT%H%M%SZ") + "_seed" + std::to_string(spec.seed);
      ctx.dir = base / stem;
      for (int k = 2; fs::exists(ctx.dir); ++k) ctx.dir = base / (stem + "_" + std::to_string(k));
    }
    fs::create_directories(ctx.dir);
  } catch (...) {
    res.status = run_detail::status_of(std::current_exception(), res.message);
    return res;
  }
  res.dir = ctx.dir;
  try {
    const std::string& c = opt.command;
    if (c == "solve") run_detail::cmd_solve(ctx);
    else if (c == "ensemble") run_detail::cmd_ensemble(ctx);
    else if (c == "harnack") run_detail::cmd_harnack(ctx);
    else if (c == "positivity") run_detail::cmd_positivity(ctx);
    else if (c == "moser") run_detail::cmd_moser(ctx);
    else if (c == "degiorgi") run_detail::cmd_degiorgi(ctx);
    else if (c == "jn") run_detail::cmd_jn(ctx);
    else if (c == "cubes") run_detail::cmd_cubes(ctx);
    else if (c == "norms") run_detail::cmd_norms(ctx);
    res.status = ctx.invalid ? 3 : 0;
    res.message = ctx.message;
  } catch (...) {
    res.status = run_detail::status_of(std::current_exception(), res.message);
  }
  nlohmann::json m;
  m["artifact"] = "harnack-lab";
  m["version"] = kVersion;
  m["subcommand"] = opt.command;
  m["master_seed"] = spec.seed;
  m["config"] = opt.config_text;
  m["overrides"] = {{"depth", opt.depth ? nlohmann::json(*opt.depth) : nlohmann::json()},
                    {"plot", opt.plot}};
  m["threads"] = opt.threads;
  m["started"] = started;
  m["finished"] = run_detail::utc_now("%Y-%m-%dT%H:%M:%SZ");
  m["files"] = ctx.files;
  nlohmann::json roster = nlohmann::json::array();
  for (const PathFailure& f : ctx.failures)
    roster.push_back({{"index", f.index}, {"step", f.step}, {"what", f.what}});
  m["failures"] = roster;
  m["exit_status"] = res.status;
  m["message"] = res.message;
  try {
    write_atomic(ctx.dir / "manifest.json", m.dump(2) + "\n");
  } catch (...) {
    std::string msg;
    const int st = run_detail::status_of(std::current_exception(), msg);
    if (res.status == 0) {
      res.status = st;
      res.message = msg;
    }
  }
  res.files = ctx.files;
  return res;
}

}  // namespace harnack
