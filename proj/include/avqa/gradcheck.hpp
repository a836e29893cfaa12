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

#include <functional>
#include <span>
#include <string>

#include "avqa/tape.hpp"

namespace avqa::numerics {

// Builds a single-element value on the given tape from the current parameter
// values. The function must bind the checked parameters through Tape::bind.
using ScalarFn = std::function<Var(Tape&)>;

// Called after the reverse pass and before the probes; lets a test corrupt the
// analytic gradients.
using GradientHook = std::function<void(std::span<Parameter* const>)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::string worst_parameter;  // empty when no entries were checked
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  double function_value = 0.0;
  std::size_t entries = 0;
};

GradCheckReport finite_difference_report(const ScalarFn& f, std::span<Parameter* const> params, double epsilon = 1e-5,
                                         const GradientHook& after_backward = {});

// Largest relative disagreement between the reverse-mode gradient and a
// central difference over every entry of `params`:
//   |analytic - numeric| / max(1e-12, |analytic| + |numeric|)
// Gradients of `params` are overwritten; values are restored on return.
// Throws EvaluationError if f is non-finite at any probe point.
double finite_difference_check(const ScalarFn& f, std::span<Parameter* const> params, double epsilon = 1e-5);

}  // namespace avqa::numerics
