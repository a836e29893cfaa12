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

#include "avqa/adam.hpp"

#include <cmath>

#include "avqa/error.hpp"

namespace avqa::numerics {

void AdamHyper::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("adam: learning_rate must be > 0");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ConfigError("adam: beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ConfigError("adam: beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ConfigError("adam: epsilon must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("adam: weight_decay must be >= 0");
}

AdamState AdamState::for_parameter(const Tensor& param, const AdamHyper& hyper) {
  hyper.validate();
  AdamState s;
  s.first_moment.assign(param.size(), 0.0);
  s.second_moment.assign(param.size(), 0.0);
  s.learning_rate = hyper.learning_rate;
  s.beta1 = hyper.beta1;
  s.beta2 = hyper.beta2;
  s.epsilon = hyper.epsilon;
  s.weight_decay = hyper.weight_decay;
  return s;
}

void adam_step(std::span<Parameter* const> params, std::span<AdamState> states) {
  if (params.size() != states.size()) {
    throw PreconditionError("adam_step: " + std::to_string(params.size()) + " parameters but " +
                            std::to_string(states.size()) + " optimizer states");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Parameter& p = *params[i];
    if (p.tensor.grad.size() != p.tensor.size()) {
      throw PreconditionError("adam_step: parameter '" + p.name + "' has no gradient");
    }
    if (states[i].first_moment.size() != p.tensor.size() || states[i].second_moment.size() != p.tensor.size()) {
      throw PreconditionError("adam_step: optimizer state does not match parameter '" + p.name + "'");
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& t = params[i]->tensor;
    AdamState& s = states[i];
    ++s.step_count;
    const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step_count));
    const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step_count));
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double g = t.grad[k];
      s.first_moment[k] = s.beta1 * s.first_moment[k] + (1.0 - s.beta1) * g;
      s.second_moment[k] = s.beta2 * s.second_moment[k] + (1.0 - s.beta2) * g * g;
      const double m_hat = s.first_moment[k] / c1;
      const double v_hat = s.second_moment[k] / c2;
      t.values[k] -= s.learning_rate * (m_hat / (std::sqrt(v_hat) + s.epsilon) + s.weight_decay * t.values[k]);
    }
  }
}

}  // namespace avqa::numerics
