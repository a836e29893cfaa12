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

#include <cstdint>
#include <span>
#include <vector>

#include "avqa/tensor.hpp"

namespace avqa::numerics {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;

  void validate() const;
};

// Optimizer state for a single parameter.
struct AdamState {
  std::uint64_t step_count = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;

  static AdamState for_parameter(const Tensor& param, const AdamHyper& hyper);
};

// One bias-corrected Adam update with decoupled weight decay:
//   p <- p - lr * (m_hat / (sqrt(v_hat) + eps) + weight_decay * p)
// Every parameter must carry a gradient; PreconditionError names the first one
// that does not.
void adam_step(std::span<Parameter* const> params, std::span<AdamState> states);

}  // namespace avqa::numerics
