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
/* harnack.hpp - umbrella header */
#pragma once

#include "config.hpp"
#include "cubes.hpp"
#include "degiorgi.hpp"
#include "ensemble.hpp"
#include "error.hpp"
#include "experiments.hpp"
#include "expression.hpp"
#include "fields.hpp"
#include "geometry.hpp"
#include "grid.hpp"
#include "io.hpp"
#include "jn.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "run.hpp"
#include "solver.hpp"
#include "stats.hpp"
