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
#include <vector>

#include "avqa/tape.hpp"
#include "avqa/tensor.hpp"

// Confidence-aware audio-visual mixer: an audio query built from the audio
// embedding and its confidence, visual keys gated by the visual confidence, and
// a sigmoid channel attention applied as a residual to the visual feature map.
namespace avqa::mixer {

using numerics::Parameter;
using numerics::Tape;
using numerics::Var;

// W_a: (d+1) x C, W_v: C x C, W_g: 1 x C. No biases.
struct MixerParams {
  Parameter w_a;
  Parameter w_v;
  Parameter w_g;

  static MixerParams init(std::size_t audio_dim, std::size_t channels, std::uint64_t seed);
  static MixerParams zeros(std::size_t audio_dim, std::size_t channels);

  std::vector<Parameter*> parameters() { return {&w_a, &w_v, &w_g}; }
};

struct MixerVars {
  Var w_a;
  Var w_v;
  Var w_g;

  static MixerVars bind(Tape& tape, MixerParams& p);
};

struct GatedKey {
  Var k_v;        // GAP(v) * W_v
  Var gate;       // sigmoid(r_v * W_g)
  Var k_v_gated;  // k_v .* gate
};

struct MixerOutput {
  Var v_enhanced;
  Var alpha;
  Var q_a;
  Var k_v;
  Var k_v_gated;
};

// q_a = [a ; r_a] * W_a.  a: [B x d], r_a: [B x 1] -> [B x C]
Var audio_query(const Var& a, const Var& r_a, const Var& w_a);

// v: [B x C x H x W], r_v: [B x 1].
GatedKey gated_visual_key(const Var& v, const Var& r_v, const Var& w_v, const Var& w_g);

// alpha = sigmoid(q_a .* k_v_gated), [B x C].
Var channel_attention(const Var& q_a, const Var& k_v_gated);

// v_enhanced[b,c,h,w] = v[b,c,h,w] * (1 + alpha[b,c]).
Var enhance(const Var& v, const Var& alpha);

// Runs the four stages. `v` and `r_v` are per frame ([B*T x C x H x W] and
// [B*T x 1]); `a` and `r_a` are per clip ([B x d], [B x 1]) and the clip's
// query is shared by its `frames_per_clip` consecutive frames.
MixerOutput mix(const Var& v, const Var& a, const Var& r_a, const Var& r_v, const MixerVars& p,
                std::size_t frames_per_clip = 1);

}  // namespace avqa::mixer
