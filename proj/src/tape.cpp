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

#include "avqa/tape.hpp"

#include <cmath>

#include "avqa/error.hpp"

namespace avqa::numerics {

const Shape& Var::shape() const { return tape_->shape(id_); }
std::span<const double> Var::value() const { return tape_->value(id_); }
std::size_t Var::size() const { return tape_->value(id_).size(); }
bool Var::tracked() const { return tape_->tracked(id_); }

double Var::item() const {
  const auto& v = tape_->value(id_);
  if (v.size() != 1) throw DimensionError("item() on tensor of shape " + shape_string(shape()));
  return v[0];
}

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Shape shape, std::vector<double> values) {
  if (shape_size(shape) != values.size()) {
    throw DimensionError("constant of shape " + shape_string(shape) + " given " + std::to_string(values.size()) +
                         " values");
  }
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(values);
  return push(std::move(n));
}

Var Tape::leaf(Tensor& t) {
  Node n;
  n.shape = t.shape;
  n.value = t.values;
  if (grad_enabled_ && t.requires_grad) {
    n.tracked = true;
    n.sink = &t;
  }
  return push(std::move(n));
}

Var Tape::record(Shape shape, std::vector<double> values, std::initializer_list<Var> inputs, Backward backward) {
  return record(std::move(shape), std::move(values), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(backward));
}

Var Tape::record(Shape shape, std::vector<double> values, std::span<const Var> inputs, Backward backward) {
  Node n;
  n.shape = std::move(shape);
  n.value = std::move(values);
  if (grad_enabled_) {
    for (const Var& in : inputs) {
      if (in.tape_ != this) throw PreconditionError("op input recorded on a different tape");
      if (nodes_[in.id_].tracked) n.tracked = true;
    }
  }
  if (n.tracked) n.backward = std::move(backward);
  return push(std::move(n));
}

std::span<double> Tape::in_grad(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.tracked) return {};
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

void Tape::backward(const Var& out) {
  if (out.tape_ != this) throw PreconditionError("backward() on a value from a different tape");
  if (nodes_[out.id_].value.size() != 1) {
    throw DimensionError("backward() needs a single-element output, got " + shape_string(nodes_[out.id_].shape));
  }
  if (!nodes_[out.id_].tracked) {
    clear();
    return;
  }
  nodes_[out.id_].grad.assign(1, 1.0);
  for (std::size_t i = out.id_ + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.tracked || n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }
  for (Node& n : nodes_) {
    if (n.sink == nullptr || n.grad.empty()) continue;
    auto& g = n.sink->grad;
    if (g.empty()) g.assign(n.grad.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += n.grad[k];
  }
  clear();
}

void Tape::clear() { nodes_.clear(); }

}  // namespace avqa::numerics
