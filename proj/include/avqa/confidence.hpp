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
#include <vector>

#include "avqa/tape.hpp"
#include "avqa/tensor.hpp"

namespace avqa::confidence {

using numerics::Parameter;
using numerics::Tape;
using numerics::Var;

// Per-frame artifact probabilities, frames x types, row-major.
struct ArtifactMatrix {
  std::size_t frames = 0;
  std::size_t types = 0;
  std::vector<double> probs;

  double at(std::size_t t, std::size_t k) const { return probs[t * types + k]; }
  // Throws DimensionError / PreconditionError when the invariants do not hold.
  void validate() const;
};

// Raw no-reference speech-quality prediction and the range it is normalized
// against.
struct AudioQualityCue {
  double raw_score = 0.0;
  double cue_min = 1.0;
  double cue_max = 5.0;
};

struct ConfidencePair {
  double r_v = 1.0;
  double r_a = 1.0;
  std::vector<double> frame_scores;
};

// r_a = clamp((raw - min) / (max - min), 0, 1). ConfigError if min >= max.
double audio_confidence(const AudioQualityCue& cue);

struct VisualConfidenceConfig {
  std::size_t artifact_types = 10;
  std::size_t heads = 4;
  std::size_t head_hidden = 16;
  std::size_t combiner_hidden = 8;
  std::size_t kernel_width = 5;

  void validate() const;
};

// Values of the visual confidence network bound to a tape.
struct VisualConfidenceVars {
  Var kernel;
  struct Head {
    Var w1, b1, w2, b2;
  };
  std::vector<Head> heads;
  Var c_w1, c_b1, c_w2, c_b2;
};

// Temporal smoothing kernel, H parallel K -> hidden -> 1 heads and an
// H -> hidden -> 1 combiner with a sigmoid output.
class VisualConfidenceNet {
 public:
  VisualConfidenceNet() = default;
  VisualConfidenceNet(const VisualConfidenceConfig& cfg, std::uint64_t seed);

  const VisualConfidenceConfig& config() const noexcept { return cfg_; }

  VisualConfidenceVars bind(Tape& tape);

  std::vector<Parameter*> kernel_parameters();
  std::vector<Parameter*> head_parameters();
  std::vector<Parameter*> combiner_parameters();
  std::vector<Parameter*> parameters();

  // Sets every weight, bias and kernel tap to zero.
  void zero_all();

  // r_t for a single smoothed artifact row.
  double frame_confidence(std::span<const double> x_t);

  // r_v and per-frame scores for one clip (no gradient tracking).
  ConfidencePair clip_visual_confidence(const ArtifactMatrix& a);

 private:
  VisualConfidenceConfig cfg_;
  Parameter kernel_;
  struct Head {
    Parameter w1, b1, w2, b2;
  };
  std::vector<Head> heads_;
  Parameter c_w1_, c_b1_, c_w2_, c_b2_;
};

// X = depthwise temporal convolution of A with the per-type kernel.
Var smooth_artifacts(const Var& a, const Var& kernel);
Var smooth_artifacts(Tape& tape, const ArtifactMatrix& a, const Var& kernel);

// [rows x K] smoothed artifact rows -> [rows x 1] frame confidences r_t.
// Rows are processed independently.
Var frame_confidence(const VisualConfidenceVars& net, const Var& x);

}  // namespace avqa::confidence
