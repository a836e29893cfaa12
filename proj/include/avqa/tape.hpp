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
#include <functional>
#include <initializer_list>
#include <span>
#include <vector>

#include "avqa/tensor.hpp"

namespace avqa::numerics {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid until the tape is
// cleared or destroyed.
class Var {
 public:
  Var() = default;

  const Shape& shape() const;
  std::span<const double> value() const;
  std::size_t size() const;
  double item() const;
  bool tracked() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Linear record of forward operations for reverse-mode differentiation.
//
// Leaves bound from a Tensor (or Parameter) accumulate into that tensor's grad
// buffer when backward() runs; the record is released afterwards. A tape built
// with grad_enabled == false records values only, so every forward op on it is
// a plain evaluation.
class Tape {
 public:
  // Called in reverse order with the id of the node being differentiated.
  using Backward = std::function<void(Tape&, std::size_t self)>;

  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool grad_enabled() const noexcept { return grad_enabled_; }

  Var constant(Shape shape, std::vector<double> values);
  Var constant(const Tensor& t) { return constant(t.shape, t.values); }

  // Tracked leaf whose gradient is accumulated into `t.grad`. On a tape with
  // grad disabled, or when t.requires_grad is false, this is a constant.
  Var leaf(Tensor& t);
  Var bind(Parameter& p) { return leaf(p.tensor); }

  // Records the result of an op. `backward` is kept only when some input is
  // tracked.
  Var record(Shape shape, std::vector<double> values, std::initializer_list<Var> inputs, Backward backward);
  Var record(Shape shape, std::vector<double> values, std::span<const Var> inputs, Backward backward);

  // Seeds d(out)/d(out) = 1 for a single-element `out`, propagates, adds leaf
  // gradients into their tensors and clears the tape.
  void backward(const Var& out);
  void clear();

  std::size_t node_count() const noexcept { return nodes_.size(); }

  const Shape& shape(std::size_t id) const { return nodes_[id].shape; }
  const std::vector<double>& value(std::size_t id) const { return nodes_[id].value; }
  bool tracked(std::size_t id) const { return nodes_[id].tracked; }

  // Gradient of the node being differentiated (always allocated during
  // backward).
  std::span<const double> out_grad(std::size_t id) const { return nodes_[id].grad; }

  // Gradient buffer to accumulate into for an op input; empty when that input
  // does not need a gradient.
  std::span<double> in_grad(std::size_t id);

 private:
  struct Node {
    Shape shape;
    std::vector<double> value;
    std::vector<double> grad;
    Tensor* sink = nullptr;
    Backward backward;
    bool tracked = false;
  };

  Var push(Node node);

  std::vector<Node> nodes_;
  bool grad_enabled_;
};

}  // namespace avqa::numerics
