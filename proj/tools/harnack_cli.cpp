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
/* harnack_cli.cpp - command line driver.
 *
 *   harnack <subcommand> [--config file] [--seed u64] [--threads k]
 *           [--out dir] [--plot] [--depth j]
 *
 * --config also accepts a manifest.json from an earlier run, in which case
 * the subcommand may be omitted and the recorded one is replayed.
 */
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "harnack/harnack.hpp"

int main(int argc, char** argv) {
  CLI::App app{"numerical lab for a semilinear SPDE with multiplicative noise"};
  std::string command, config_path;
  std::uint64_t seed = 0;
  int threads = 1, depth = -1;
  std::string out;
  bool plot = false;
  app.add_option("subcommand", command,
                 "solve | ensemble | harnack | positivity | moser | degiorgi | jn | cubes | norms");
  app.add_option("--config", config_path, "config file or manifest.json");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  app.add_option("--threads", threads, "worker threads (never changes results)")
      ->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "parent directory for the run directory");
  app.add_flag("--plot", plot, "also write SVG charts");
  auto* depth_opt = app.add_option("--depth", depth, "cube hierarchy depth")
                        ->check(CLI::NonNegativeNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  harnack::RunOptions opt;
  opt.command = command;
  opt.threads = threads;
  opt.plot = plot;
  if (*seed_opt) opt.seed = seed;
  if (*out_opt) opt.out = out;
  if (*depth_opt) opt.depth = depth;
  if (!config_path.empty()) {
    try {
      opt.config_text = harnack::read_file(config_path);
    } catch (const harnack::Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  if (opt.command.empty() && !harnack::looks_like_manifest(opt.config_text)) {
    std::cerr << "error: a subcommand is required\n" << app.help();
    return 2;
  }

  const harnack::RunResult r = harnack::dispatch(opt);
  if (!r.dir.empty()) std::cout << "run directory: " << r.dir.string() << "\n";
  for (const std::string& f : r.files) std::cout << "  " << f << "\n";
  if (r.status == 0) {
    std::cout << r.message << "\n";
  } else {
    std::cerr << "error (exit " << r.status << "): " << r.message << "\n";
  }
  return r.status;
}
