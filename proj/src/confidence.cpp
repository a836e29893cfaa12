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

#include "avqa/confidence.hpp"

#include <algorithm>
#include <cmath>

#include "avqa/error.hpp"
#include "avqa/ops.hpp"

namespace avqa::confidence {

using numerics::Shape;
using numerics::Tensor;

void ArtifactMatrix::validate() const {
  if (probs.size() != frames * types) {
    throw DimensionError("artifact matrix " + std::to_string(frames) + "x" + std::to_string(types) + " holds " +
                         std::to_string(probs.size()) + " values");
  }
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("artifact probability outside [0, 1]");
  }
}

double audio_confidence(const AudioQualityCue& cue) {
  if (!(cue.cue_min < cue.cue_max)) {
    throw ConfigError("audio cue range requires cue_min < cue_max, got [" + std::to_string(cue.cue_min) + ", " +
                      std::to_string(cue.cue_max) + "]");
  }
  return std::clamp((cue.raw_score - cue.cue_min) / (cue.cue_max - cue.cue_min), 0.0, 1.0);
}

void VisualConfidenceConfig::validate() const {
  if (artifact_types == 0 || heads == 0 || head_hidden == 0 || combiner_hidden == 0) {
    throw ConfigError("visual confidence dimensions must be positive");
  }
  if (kernel_width % 2 == 0) throw ConfigError("temporal kernel width must be odd");
}

namespace {

Parameter make_param(std::string name, Shape shape, std::size_t fan_in, std::uint64_t seed, std::uint64_t stream) {
  return Parameter{std::move(name), numerics::uniform_fan_in(std::move(shape), fan_in, numerics::mix_seed(seed, stream))};
}

}  // namespace

VisualConfidenceNet::VisualConfidenceNet(const VisualConfidenceConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  const std::size_t k = cfg_.artifact_types;
  const std::size_t w = cfg_.kernel_width;
  kernel_ = Parameter{"vcm.kernel", Tensor::filled({k, w}, 1.0 / static_cast<double>(w), true)};
  std::uint64_t stream = 100;
  for (std::size_t h = 0; h < cfg_.heads; ++h) {
    const std::string prefix = "vcm.head" + std::to_string(h) + ".";
    Head head;
    head.w1 = make_param(prefix + "w1", {k, cfg_.head_hidden}, k, seed, stream++);
    head.b1 = make_param(prefix + "b1", {cfg_.head_hidden}, k, seed, stream++);
    head.w2 = make_param(prefix + "w2", {cfg_.head_hidden, 1}, cfg_.head_hidden, seed, stream++);
    head.b2 = make_param(prefix + "b2", {1}, cfg_.head_hidden, seed, stream++);
    heads_.push_back(std::move(head));
  }
  c_w1_ = make_param("vcm.combiner.w1", {cfg_.heads, cfg_.combiner_hidden}, cfg_.heads, seed, stream++);
  c_b1_ = make_param("vcm.combiner.b1", {cfg_.combiner_hidden}, cfg_.heads, seed, stream++);
  c_w2_ = make_param("vcm.combiner.w2", {cfg_.combiner_hidden, 1}, cfg_.combiner_hidden, seed, stream++);
  c_b2_ = make_param("vcm.combiner.b2", {1}, cfg_.combiner_hidden, seed, stream++);
}

VisualConfidenceVars VisualConfidenceNet::bind(Tape& tape) {
  VisualConfidenceVars v;
  v.kernel = tape.bind(kernel_);
  for (Head& h : heads_) v.heads.push_back({tape.bind(h.w1), tape.bind(h.b1), tape.bind(h.w2), tape.bind(h.b2)});
  v.c_w1 = tape.bind(c_w1_);
  v.c_b1 = tape.bind(c_b1_);
  v.c_w2 = tape.bind(c_w2_);
  v.c_b2 = tape.bind(c_b2_);
  return v;
}

std::vector<Parameter*> VisualConfidenceNet::kernel_parameters() { return {&kernel_}; }

std::vector<Parameter*> VisualConfidenceNet::head_parameters() {
  std::vector<Parameter*> out;
  for (Head& h : heads_) out.insert(out.end(), {&h.w1, &h.b1, &h.w2, &h.b2});
  return out;
}

std::vector<Parameter*> VisualConfidenceNet::combiner_parameters() { return {&c_w1_, &c_b1_, &c_w2_, &c_b2_}; }

std::vector<Parameter*> VisualConfidenceNet::parameters() {
  std::vector<Parameter*> out = kernel_parameters();
  for (Parameter* p : head_parameters()) out.push_back(p);
  for (Parameter* p : combiner_parameters()) out.push_back(p);
  return out;
}

void VisualConfidenceNet::zero_all() {
  for (Parameter* p : parameters()) std::fill(p->tensor.values.begin(), p->tensor.values.end(), 0.0);
}

double VisualConfidenceNet::frame_confidence(std::span<const double> x_t) {
  if (x_t.size() != cfg_.artifact_types) {
    throw DimensionError("frame_confidence: expected " + std::to_string(cfg_.artifact_types) + " artifact types, got " +
                         std::to_string(x_t.size()));
  }
  Tape tape(false);
  const VisualConfidenceVars net = bind(tape);
  const Var x = tape.constant({1, x_t.size()}, std::vector<double>(x_t.begin(), x_t.end()));
  return confidence::frame_confidence(net, x).item();
}

ConfidencePair VisualConfidenceNet::clip_visual_confidence(const ArtifactMatrix& a) {
  if (a.frames == 0) throw DegenerateInputError("clip_visual_confidence: clip has no frames");
  if (a.types != cfg_.artifact_types) {
    throw DimensionError("clip_visual_confidence: expected " + std::to_string(cfg_.artifact_types) +
                         " artifact types, got " + std::to_string(a.types));
  }
  Tape tape(false);
  const VisualConfidenceVars net = bind(tape);
  const Var x = smooth_artifacts(tape, a, net.kernel);
  const Var scores = confidence::frame_confidence(net, x);
  const Var r_v = numerics::mean(scores);
  ConfidencePair out;
  out.r_v = r_v.item();
  out.frame_scores.assign(scores.value().begin(), scores.value().end());
  return out;
}

Var smooth_artifacts(const Var& a, const Var& kernel) { return numerics::depthwise_temporal_conv1d(a, kernel); }

Var smooth_artifacts(Tape& tape, const ArtifactMatrix& a, const Var& kernel) {
  a.validate();
  return smooth_artifacts(tape.constant({a.frames, a.types}, a.probs), kernel);
}

Var frame_confidence(const VisualConfidenceVars& net, const Var& x) {
  using namespace numerics;
  std::vector<Var> head_out;
  head_out.reserve(net.heads.size());
  for (const auto& h : net.heads) {
    const Var hidden = relu(add_bias(matmul(x, h.w1), h.b1));
    head_out.push_back(add_bias(matmul(hidden, h.w2), h.b2));
  }
  const Var stacked = concat_cols(head_out);
  const Var hidden = relu(add_bias(matmul(stacked, net.c_w1), net.c_b1));
  return sigmoid(add_bias(matmul(hidden, net.c_w2), net.c_b2));
}

}  // namespace avqa::confidence
