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

#include "avqa/mixer.hpp"

#include "avqa/error.hpp"
#include "avqa/ops.hpp"

namespace avqa::mixer {

using numerics::shape_string;
using numerics::Tensor;

MixerParams MixerParams::init(std::size_t audio_dim, std::size_t channels, std::uint64_t seed) {
  MixerParams p;
  p.w_a = {"mixer.w_a", numerics::uniform_fan_in({audio_dim + 1, channels}, audio_dim + 1, numerics::mix_seed(seed, 1))};
  p.w_v = {"mixer.w_v", numerics::uniform_fan_in({channels, channels}, channels, numerics::mix_seed(seed, 2))};
  p.w_g = {"mixer.w_g", numerics::uniform_fan_in({1, channels}, 1, numerics::mix_seed(seed, 3))};
  return p;
}

MixerParams MixerParams::zeros(std::size_t audio_dim, std::size_t channels) {
  MixerParams p;
  p.w_a = {"mixer.w_a", Tensor::zeros({audio_dim + 1, channels}, true)};
  p.w_v = {"mixer.w_v", Tensor::zeros({channels, channels}, true)};
  p.w_g = {"mixer.w_g", Tensor::zeros({1, channels}, true)};
  return p;
}

MixerVars MixerVars::bind(Tape& tape, MixerParams& p) { return {tape.bind(p.w_a), tape.bind(p.w_v), tape.bind(p.w_g)}; }

Var audio_query(const Var& a, const Var& r_a, const Var& w_a) {
  const Var parts[] = {a, r_a};
  return numerics::matmul(numerics::concat_cols(parts), w_a);
}

GatedKey gated_visual_key(const Var& v, const Var& r_v, const Var& w_v, const Var& w_g) {
  GatedKey out;
  out.k_v = numerics::matmul(numerics::global_average_pool(v), w_v);
  out.gate = numerics::sigmoid(numerics::matmul(r_v, w_g));
  out.k_v_gated = numerics::mul(out.k_v, out.gate);
  return out;
}

Var channel_attention(const Var& q_a, const Var& k_v_gated) {
  return numerics::sigmoid(numerics::mul(q_a, k_v_gated));
}

Var enhance(const Var& v, const Var& alpha) {
  const auto& s = v.shape();
  if (s.size() != 4 || alpha.shape().size() != 2 || alpha.shape()[0] != s[0] || alpha.shape()[1] != s[1]) {
    throw DimensionError("enhance: incompatible shapes " + shape_string(s) + " and " + shape_string(alpha.shape()));
  }
  const std::size_t bc = s[0] * s[1], hw = s[2] * s[3];
  const auto vv = v.value();
  const auto av = alpha.value();
  std::vector<double> out(vv.size());
  for (std::size_t i = 0; i < bc; ++i) {
    const double scale = 1.0 + av[i];
    for (std::size_t p = 0; p < hw; ++p) out[i * hw + p] = vv[i * hw + p] * scale;
  }
  const std::size_t iv = v.id(), ia = alpha.id();
  return v.tape().record(s, std::move(out), {v, alpha}, [iv, ia, bc, hw](Tape& t, std::size_t self) {
    const auto g = t.out_grad(self);
    const auto& vv = t.value(iv);
    const auto& av = t.value(ia);
    auto gv = t.in_grad(iv);
    auto ga = t.in_grad(ia);
    for (std::size_t i = 0; i < bc; ++i) {
      const double scale = 1.0 + av[i];
      double acc = 0.0;
      for (std::size_t p = 0; p < hw; ++p) {
        if (!gv.empty()) gv[i * hw + p] += g[i * hw + p] * scale;
        acc += g[i * hw + p] * vv[i * hw + p];
      }
      if (!ga.empty()) ga[i] += acc;
    }
  });
}

MixerOutput mix(const Var& v, const Var& a, const Var& r_a, const Var& r_v, const MixerVars& p,
                std::size_t frames_per_clip) {
  if (v.shape().size() != 4) throw DimensionError("mix: visual features must be rank 4, got " + shape_string(v.shape()));
  if (a.shape().size() != 2 || a.shape()[0] * frames_per_clip != v.shape()[0]) {
    throw DimensionError("mix: " + shape_string(a.shape()) + " audio rows do not match " +
                         shape_string(v.shape()) + " visual frames at " + std::to_string(frames_per_clip) +
                         " frames per clip");
  }
  MixerOutput out;
  Var q = audio_query(a, r_a, p.w_a);
  if (frames_per_clip > 1) q = numerics::repeat_rows(q, frames_per_clip);
  const GatedKey key = gated_visual_key(v, r_v, p.w_v, p.w_g);
  out.q_a = q;
  out.k_v = key.k_v;
  out.k_v_gated = key.k_v_gated;
  out.alpha = channel_attention(q, key.k_v_gated);
  out.v_enhanced = enhance(v, out.alpha);
  return out;
}

}  // namespace avqa::mixer
