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
#include <map>
#include <span>
#include <string>
#include <vector>

#include "avqa/confidence.hpp"
#include "avqa/mixer.hpp"
#include "avqa/tape.hpp"
#include "avqa/tensor.hpp"

namespace avqa::model {

using confidence::ArtifactMatrix;
using confidence::AudioQualityCue;
using confidence::ConfidencePair;
using numerics::Parameter;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

struct ModelConfig {
  std::size_t channels = 32;
  std::size_t height = 4;
  std::size_t width = 4;
  std::size_t audio_dim = 16;
  std::size_t frames = 8;
  std::size_t artifact_types = 10;
  bool use_avm = true;
  bool use_vcm = true;
  bool use_acm = true;
  double lambda_pcc = 0.15;
  std::size_t fusion_hidden = 64;
  std::uint64_t seed = 0;

  // Visual confidence network sizes.
  std::size_t vcm_heads = 4;
  std::size_t vcm_head_hidden = 16;
  std::size_t vcm_combiner_hidden = 8;
  std::size_t vcm_kernel_width = 5;

  void validate() const;

  // "key=value" lines in a fixed order; parse() accepts the same text.
  std::string to_text() const;
  static ModelConfig parse(const std::string& text);

  // "+,+,-" style label in AVM, VCM, ACM order.
  std::string toggle_label() const;
};

// One training example. visual is [T x C x H x W]; audio has audio_dim entries;
// mos is normalized to [0, 1].
struct ClipSample {
  Tensor visual;
  std::vector<double> audio;
  ArtifactMatrix artifacts;
  AudioQualityCue audio_cue;
  double mos = 0.0;
};

struct Prediction {
  double score = 0.0;
  ConfidencePair confidences;
  std::vector<double> alpha_mean;  // temporal mean of the channel attention; empty without the mixer
};

struct ParameterGroup {
  std::string name;
  std::vector<Parameter*> params;
};

// Per-batch values produced by the forward pass.
struct ForwardOutput {
  Var score;         // [B x 1]
  Var r_v;           // [B x 1]
  Var r_a;           // [B x 1]
  Var frame_scores;  // [B*T x 1], only with the visual confidence module
  Var alpha;         // [B*T x C], only with the mixer
};

// Confidence estimation, audio-visual mixer, confidence-weighted fusion MLP
// and a sigmoid regression head. Disabled modules are replaced by the neutral
// confidence 1.0 (confidence modules) or by plain temporal pooling of the GAP'd
// visual features (mixer).
class AvqaModel {
 public:
  explicit AvqaModel(const ModelConfig& cfg);

  const ModelConfig& config() const noexcept { return cfg_; }

  ForwardOutput forward(Tape& tape, std::span<const ClipSample> batch);

  std::vector<Prediction> predict(std::span<const ClipSample> batch);
  std::vector<double> predict_scores(std::span<const ClipSample> samples, std::size_t chunk = 64);

  // Every parameter, in checkpoint order.
  std::vector<Parameter*> parameters();
  // Parameters that reach the output under the current toggles.
  std::vector<Parameter*> trainable_parameters();
  // Named groups used for gradient-check reporting (active modules only).
  std::vector<ParameterGroup> parameter_groups();

  mixer::MixerParams& mixer_params() { return mixer_; }
  confidence::VisualConfidenceNet& vcm() { return vcm_; }

  // Throws DimensionError naming the offending sample index.
  void check_batch(std::span<const ClipSample> batch) const;

 private:
  ModelConfig cfg_;
  confidence::VisualConfidenceNet vcm_;
  mixer::MixerParams mixer_;
  Parameter fusion_w1_, fusion_b1_, head_w2_, head_b2_;
};

// 1 - Pearson(pred, target) over the batch, clamped to [0, 2].
// PreconditionError for fewer than two entries; ZeroVarianceError when either
// side is (numerically) constant.
Var pcc_loss(const Var& pred, std::span<const double> target);
double pcc_loss(std::span<const double> pred, std::span<const double> target);

Var mse_loss(const Var& pred, std::span<const double> target);

struct LossValue {
  Var loss;
  bool pcc_fallback = false;  // true when the correlation term was dropped
};

// MSE + lambda * pcc_loss. On a zero-variance batch the correlation term is
// dropped and the event is flagged.
LossValue total_loss(const Var& pred, std::span<const double> target, double lambda_pcc);
double total_loss(std::span<const double> pred, std::span<const double> target, double lambda_pcc,
                  bool* pcc_fallback = nullptr);

}  // namespace avqa::model
