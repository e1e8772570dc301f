/*
 * Copyright 2026 The hsbm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>

namespace hsbm {

// Binomial/capacity computation left the 64-bit range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Mean or maximum degree too small for a degree-derived quantity
// (log of the mean degree, the 3/4 power threshold, ...).
class DegenerateDegreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative eigensolver stopped before reaching the requested tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// Ball-peeling initialization drew fewer candidate centers than communities.
class InsufficientSampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hsbm
