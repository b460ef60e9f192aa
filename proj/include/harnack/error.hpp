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
/* error.hpp - exception types shared by every module */
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace harnack {

// Base of everything the library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Validation failures (CLI exit status 2).
struct InvalidArgument : Error { using Error::Error; };
struct EmptyRegion : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct StateError : Error { using Error::Error; };
struct OutOfRange : Error { using Error::Error; };
struct ResourceLimit : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct EmptyEnsemble : Error { using Error::Error; };

struct ModelInvalid : Error {
  double t, u;
  double x[2];
  ModelInvalid(const std::string& what, double t_, const double* x_, int n,
               double u_)
      : Error(what), t(t_), u(u_), x{x_[0], n > 1 ? x_[1] : 0.0} {}
};

struct ParseError : Error {
  int line;
  ParseError(const std::string& what, int line_)
      : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what : what),
        line(line_) {}
};

// Numeric failures (CLI exit status 3).
struct NumericError : Error { using Error::Error; };

struct BlowUp : NumericError {
  std::size_t step;
  BlowUp(const std::string& what, std::size_t step_)
      : NumericError(what + " at step " + std::to_string(step_)), step(step_) {}
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace harnack
