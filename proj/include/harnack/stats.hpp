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
/* stats.hpp - counter-based seeding, binomial tail estimates with Wilson
 * intervals, and small order statistics helpers.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "error.hpp"

namespace harnack {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of path i: a pure function of (master, i), never of scheduling.
inline std::uint64_t path_seed(std::uint64_t master, std::uint64_t i) {
  return splitmix64(master ^ splitmix64(i));
}

struct TailEstimate {
  std::size_t hits = 0;
  std::size_t trials = 0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 1.0;
};

constexpr double kWilsonZ95 = 1.959963984540054;

inline TailEstimate wilson(std::size_t hits, std::size_t trials, double z = kWilsonZ95) {
  if (trials == 0) throw EmptyEnsemble("tail estimate over zero trials");
  require(hits <= trials, "hits exceed trials");
  TailEstimate e;
  e.hits = hits;
  e.trials = trials;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  e.p_hat = p;
  const double z2 = z * z;
  const double den = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
  e.ci_lo = std::clamp(center - half, 0.0, p);
  e.ci_hi = std::clamp(center + half, p, 1.0);
  if (hits == 0) e.ci_lo = 0.0;
  if (hits == trials) e.ci_hi = 1.0;
  return e;
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InsufficientData("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double percentile(std::vector<double> v, double q) {
  if (v.empty()) throw InsufficientData("percentile of an empty sample");
  std::sort(v.begin(), v.end());
  const double r = std::ceil(q * static_cast<double>(v.size()));
  const auto i = static_cast<std::size_t>(std::clamp(r, 1.0, static_cast<double>(v.size())));
  return v[i - 1];
}

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSE mean_se(const std::vector<double>& v) {
  if (v.empty()) throw InsufficientData("mean of an empty sample");
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  const double n = static_cast<double>(v.size());
  return {m, v.size() > 1 ? std::sqrt(s / (n - 1.0) / n) : 0.0};
}

}  // namespace harnack
