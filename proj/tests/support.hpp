// Copyright 2026 The mcm-avqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "avqa/gradcheck.hpp"
#include "avqa/tensor.hpp"

namespace avqa::testing {

inline std::vector<double> uniform_values(std::mt19937_64& rng, std::size_t n, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

inline numerics::Parameter random_parameter(std::mt19937_64& rng, const std::string& name, numerics::Shape shape,
                                            double lo = -2.0, double hi = 2.0) {
  const std::size_t n = numerics::shape_size(shape);
  return {name, numerics::Tensor(std::move(shape), uniform_values(rng, n, lo, hi), true)};
}

// Central differences with an absolute allowance of `ulps` units of the
// difference quotient's rounding resolution, DBL_EPSILON * max(1, |f|) / (2 eps).
// Returns the worst |a - n| / (tol * (|a| + |n|) + allowance); below 1 passes.
inline double gradient_excess(const numerics::ScalarFn& f, std::span<numerics::Parameter* const> params,
                              double eps = 1e-5, double tol = 1e-5, double ulps = 16.0) {
  for (auto* p : params) p->tensor.zero_grad();
  double fx = 0.0;
  {
    numerics::Tape tape(true);
    const auto y = f(tape);
    fx = y.item();
    tape.backward(y);
  }
  const auto eval = [&] {
    numerics::Tape tape(false);
    return f(tape).item();
  };
  const double allowance = ulps * DBL_EPSILON * std::max(1.0, std::abs(fx)) / (2.0 * eps);
  double worst = 0.0;
  for (auto* p : params)
    for (std::size_t k = 0; k < p->tensor.size(); ++k) {
      const double x = p->tensor.values[k];
      p->tensor.values[k] = x + eps;
      const double up = eval();
      p->tensor.values[k] = x - eps;
      const double down = eval();
      p->tensor.values[k] = x;
      const double n = (up - down) / (2.0 * eps);
      const double a = p->tensor.grad[k];
      worst = std::max(worst, std::abs(a - n) / (tol * (std::abs(a) + std::abs(n)) + allowance));
    }
  return worst;
}

}  // namespace avqa::testing
