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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace avqa::numerics {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major array of doubles with an optional gradient buffer.
//
// Invariants: shape_size(shape) == values.size(); grad is either empty or the
// same length as values.
struct Tensor {
  Shape shape;
  std::vector<double> values;
  std::vector<double> grad;
  bool requires_grad = false;

  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor filled(Shape shape, double value, bool requires_grad = false);

  std::size_t size() const noexcept { return values.size(); }
  std::size_t rank() const noexcept { return shape.size(); }
  bool has_grad() const noexcept { return !grad.empty(); }

  void zero_grad();
};

// A learnable tensor with a stable name, used by the optimizer, gradient
// checks and checkpoints.
struct Parameter {
  std::string name;
  Tensor tensor;
};

// SplitMix64 of (seed, stream); gives independent generator seeds for each
// parameter or clip drawn from one user seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Uniform in [-sqrt(1/fan_in), +sqrt(1/fan_in)], drawn from the supplied seed.
Tensor uniform_fan_in(Shape shape, std::size_t fan_in, std::uint64_t seed);

}  // namespace avqa::numerics
