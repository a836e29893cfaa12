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

#include "avqa/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "avqa/error.hpp"

namespace avqa::numerics {
namespace {

double evaluate(const ScalarFn& f) {
  Tape tape(false);
  const double y = f(tape).item();
  if (!std::isfinite(y)) throw EvaluationError("finite_difference_check: function value is not finite");
  return y;
}

}  // namespace

GradCheckReport finite_difference_report(const ScalarFn& f, std::span<Parameter* const> params, double epsilon,
                                         const GradientHook& after_backward) {
  if (!(epsilon > 0.0)) throw ConfigError("finite_difference_check: epsilon must be > 0");

  GradCheckReport report;
  for (Parameter* p : params) p->tensor.zero_grad();
  {
    Tape tape(true);
    const Var y = f(tape);
    report.function_value = y.item();
    if (!std::isfinite(report.function_value)) {
      throw EvaluationError("finite_difference_check: function value is not finite");
    }
    tape.backward(y);
  }
  if (after_backward) after_backward(params);

  for (Parameter* p : params) {
    auto& values = p->tensor.values;
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double original = values[k];
      values[k] = original + epsilon;
      const double up = evaluate(f);
      values[k] = original - epsilon;
      const double down = evaluate(f);
      values[k] = original;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double analytic = p->tensor.grad[k];
      const double denom = std::max(1e-12, std::abs(analytic) + std::abs(numeric));
      const double rel = std::abs(analytic - numeric) / denom;
      ++report.entries;
      if (rel > report.max_relative_error || report.worst_parameter.empty()) {
        report.max_relative_error = std::max(report.max_relative_error, rel);
        report.worst_parameter = p->name;
        report.worst_index = k;
        report.worst_analytic = analytic;
        report.worst_numeric = numeric;
      }
    }
  }
  return report;
}

double finite_difference_check(const ScalarFn& f, std::span<Parameter* const> params, double epsilon) {
  return finite_difference_report(f, params, epsilon).max_relative_error;
}

}  // namespace avqa::numerics
