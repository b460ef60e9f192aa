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
/* ensemble.hpp - data-parallel path ensembles. Paths are integrated,
 * reduced to a caller-chosen summary and dropped, so memory stays at one
 * path per worker. Results are stored by path index; seeds depend only on
 * (master_seed, index), so the worker count never changes any output.
 */
#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "model.hpp"
#include "solver.hpp"
#include "stats.hpp"

namespace harnack {

struct EnsembleSpec {
  Grid grid;
  CoefficientModel model;
  SolverConfig solver;
  std::function<FieldSnapshot(std::size_t)> initial;  // path index -> u0
  double T = 1.0;
  std::size_t N = 1;
  std::uint64_t master_seed = 1;
  int threads = 1;
  bool validate = true;
  int validation_samples = 512;
};

struct PathFailure {
  std::size_t index;
  std::size_t step;
  std::string what;
};

template <class S>
struct Ensemble {
  std::size_t N = 0;
  std::vector<std::optional<S>> results;
  std::vector<PathFailure> failures;  // sorted by index

  std::size_t successes() const { return N - failures.size(); }
  // More than 1% failed paths invalidates the run.
  bool valid() const { return failures.size() * 100 <= N; }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i < N; ++i)
      if (results[i]) f(i, *results[i]);
  }
  std::vector<S> collect() const {
    std::vector<S> out;
    for (const auto& r : results)
      if (r) out.push_back(*r);
    return out;
  }
};

inline int hardware_threads() {
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

// summarize(path, index) -> S must be a pure function of its arguments.
template <class Summarize>
auto run_ensemble(const EnsembleSpec& spec, Summarize&& summarize)
    -> Ensemble<std::decay_t<std::invoke_result_t<Summarize&, const FieldPath&, std::size_t>>> {
  using S = std::decay_t<std::invoke_result_t<Summarize&, const FieldPath&, std::size_t>>;
  require(spec.N >= 1, "ensemble needs N >= 1");
  require(static_cast<bool>(spec.initial), "ensemble needs an initial condition");
  if (spec.validate)
    validate_model(spec.model, spec.validation_samples, spec.master_seed, spec.grid.X, spec.T);

  Ensemble<S> ens;
  ens.N = spec.N;
  ens.results.resize(spec.N);
  std::vector<std::optional<PathFailure>> fail(spec.N);
  std::atomic<std::size_t> next{0};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= spec.N) return;
      try {
        const FieldSnapshot u0 = spec.initial(i);
        const FieldPath path =
            solve_path(u0, spec.model, spec.solver, spec.T, path_seed(spec.master_seed, i));
        ens.results[i] = summarize(path, i);
      } catch (const BlowUp& e) {
        fail[i] = PathFailure{i, e.step, e.what()};
      } catch (const NumericError& e) {
        fail[i] = PathFailure{i, 0, e.what()};
      } catch (...) {
        std::lock_guard<std::mutex> lk(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        next.store(spec.N);
        return;
      }
    }
  };

  const int nt = std::max(1, std::min<int>(spec.threads, static_cast<int>(spec.N)));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  for (auto& f : fail)
    if (f) ens.failures.push_back(*f);
  return ens;
}

// Fraction of successful paths where both predicates hold.
template <class S, class E1, class E2>
TailEstimate joint_tail(const Ensemble<S>& ens, E1&& e1, E2&& e2) {
  std::size_t hits = 0, trials = 0;
  ens.for_each([&](std::size_t, const S& s) {
    ++trials;
    if (e1(s) && e2(s)) ++hits;
  });
  if (trials == 0) throw EmptyEnsemble("no successful paths in the ensemble");
  return wilson(hits, trials);
}

}  // namespace harnack
