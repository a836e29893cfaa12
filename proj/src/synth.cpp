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

#include "avqa/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "avqa/error.hpp"
#include "avqa/ops.hpp"

namespace avqa::synth {

std::string mode_name(DistortionMode m) {
  switch (m) {
    case DistortionMode::clean: return "clean";
    case DistortionMode::video_only: return "video_only";
    case DistortionMode::audio_only: return "audio_only";
    case DistortionMode::both: return "both";
  }
  return "unknown";
}

DistortionMode parse_mode(const std::string& s) {
  if (s == "clean") return DistortionMode::clean;
  if (s == "video_only") return DistortionMode::video_only;
  if (s == "audio_only") return DistortionMode::audio_only;
  if (s == "both") return DistortionMode::both;
  throw ConfigError("unknown distortion mode '" + s + "'");
}

void DistortionScenario::validate() const {
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  if (!in_unit(video_severity) || !in_unit(audio_severity)) throw ConfigError("severities must lie in [0, 1]");
  const bool video_ok = mode == DistortionMode::video_only || mode == DistortionMode::both || video_severity == 0.0;
  const bool audio_ok = mode == DistortionMode::audio_only || mode == DistortionMode::both || audio_severity == 0.0;
  if (!video_ok || !audio_ok) throw ConfigError("scenario " + mode_name(mode) + " has severity on an undistorted modality");
}

double ArtifactProfile::probability(double severity) const {
  const double at0 = numerics::sigmoid(-slope * midpoint);
  const double at1 = numerics::sigmoid(slope * (1.0 - midpoint));
  const double response = (numerics::sigmoid(slope * (severity - midpoint)) - at0) / (at1 - at0);
  return base_rate + (peak - base_rate) * response;
}

GeneratorSpec GeneratorSpec::make_default(std::uint64_t profile_seed) {
  GeneratorSpec spec;
  std::mt19937_64 rng(numerics::mix_seed(profile_seed, 0xA7));
  std::uniform_real_distribution<double> base(0.02, 0.10), peak(0.70, 0.95), mid(0.2, 0.8), slope(6.0, 14.0);
  spec.profiles.resize(spec.artifact_types);
  for (ArtifactProfile& p : spec.profiles) {
    p.base_rate = base(rng);
    p.peak = peak(rng);
    p.midpoint = mid(rng);
    p.slope = slope(rng);
  }
  return spec;
}

GeneratorSpec GeneratorSpec::noiseless() const {
  GeneratorSpec s = *this;
  s.noise_std = 0.0;
  s.artifact_noise = 0.0;
  s.cue_noise = 0.0;
  return s;
}

model::ModelConfig GeneratorSpec::model_config() const {
  model::ModelConfig cfg;
  cfg.channels = channels;
  cfg.height = height;
  cfg.width = width;
  cfg.audio_dim = audio_dim;
  cfg.frames = frames;
  cfg.artifact_types = artifact_types;
  return cfg;
}

void GeneratorSpec::validate() const {
  if (channels == 0 || height == 0 || width == 0 || audio_dim == 0 || frames == 0 || artifact_types == 0) {
    throw ConfigError("generator dimensions must be positive");
  }
  if (!(w_v >= 0.0 && w_a >= 0.0) || std::abs(w_v + w_a - 1.0) > 1e-12) {
    throw ConfigError("generator weights must be non-negative and sum to 1");
  }
  if (profiles.size() != artifact_types) throw ConfigError("one artifact profile per artifact type required");
  if (!(noise_std >= 0.0 && artifact_noise >= 0.0 && cue_noise >= 0.0)) throw ConfigError("noise levels must be >= 0");
  if (!(cue_min < cue_max)) throw ConfigError("cue_min must be below cue_max");
  if (!(content_scale_min > 0.0 && content_scale_min <= content_scale_max)) {
    throw ConfigError("content scale range must be positive and ordered");
  }
  if (!(attenuation >= 0.0 && attenuation < 1.0)) throw ConfigError("attenuation must lie in [0, 1)");
  if (!(corruption >= 0.0 && flicker >= 0.0 && content_std >= 0.0 && texture_std >= 0.0 && jitter_std >= 0.0)) {
    throw ConfigError("generator spreads must be >= 0");
  }
  if (!std::isfinite(content_mean)) throw ConfigError("content_mean must be finite");
}

ClipSample generate_clip(const DistortionScenario& scenario, const GeneratorSpec& spec) {
  scenario.validate();
  spec.validate();
  const double sv = scenario.video_severity;
  const double sa = scenario.audio_severity;
  std::mt19937_64 rng(numerics::mix_seed(scenario.seed, 0x5EED));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale_dist(spec.content_scale_min, spec.content_scale_max);

  const std::size_t t_n = spec.frames, c_n = spec.channels, hw = spec.height * spec.width;
  const double scale = scale_dist(rng);
  std::vector<double> content(c_n);
  for (double& z : content) z = spec.content_mean + spec.content_std * normal(rng);
  std::vector<double> texture(c_n * hw);
  for (double& u : texture) u = spec.texture_std * normal(rng);

  ClipSample clip;
  const double visual_gain = scale * (1.0 - spec.attenuation * sv);
  std::vector<double> visual(t_n * c_n * hw);
  for (std::size_t t = 0; t < t_n; ++t)
    for (std::size_t c = 0; c < c_n; ++c) {
      const double offset = spec.flicker * sv * normal(rng);
      for (std::size_t p = 0; p < hw; ++p) {
        const double signal = content[c] + texture[c * hw + p] + spec.jitter_std * normal(rng);
        visual[(t * c_n + c) * hw + p] = visual_gain * signal + offset + spec.corruption * sv * normal(rng);
      }
    }
  clip.visual = numerics::Tensor({t_n, c_n, spec.height, spec.width}, std::move(visual));

  clip.artifacts.frames = t_n;
  clip.artifacts.types = spec.artifact_types;
  clip.artifacts.probs.resize(t_n * spec.artifact_types);
  for (std::size_t t = 0; t < t_n; ++t)
    for (std::size_t k = 0; k < spec.artifact_types; ++k) {
      const double p = spec.profiles[k].probability(sv) + spec.artifact_noise * unit(rng);
      clip.artifacts.probs[t * spec.artifact_types + k] = std::clamp(p, 0.0, 1.0);
    }

  // The audio embedding observes the same latent content as the video.
  const double audio_gain = scale * (1.0 - spec.attenuation * sa);
  clip.audio.resize(spec.audio_dim);
  for (std::size_t j = 0; j < spec.audio_dim; ++j) {
    clip.audio[j] = audio_gain * content[j % c_n] + spec.corruption * sa * normal(rng);
  }

  clip.audio_cue.cue_min = spec.cue_min;
  clip.audio_cue.cue_max = spec.cue_max;
  clip.audio_cue.raw_score = spec.cue_max - (spec.cue_max - spec.cue_min) * sa + spec.cue_noise * normal(rng);

  const double eps = spec.noise_std * normal(rng);
  clip.mos = std::clamp(1.0 - spec.w_v * sv - spec.w_a * sa + eps, 0.0, 1.0);
  return clip;
}

ScenarioMix ScenarioMix::only(DistortionMode m, double video_max, double audio_max) {
  ScenarioMix mix{0.0, 0.0, 0.0, 0.0, video_max, audio_max};
  switch (m) {
    case DistortionMode::clean: mix.clean = 1.0; break;
    case DistortionMode::video_only: mix.video_only = 1.0; break;
    case DistortionMode::audio_only: mix.audio_only = 1.0; break;
    case DistortionMode::both: mix.both = 1.0; break;
  }
  return mix;
}

void ScenarioMix::validate() const {
  if (!(clean >= 0.0 && video_only >= 0.0 && audio_only >= 0.0 && both >= 0.0)) {
    throw ConfigError("scenario mix weights must be >= 0");
  }
  if (!(clean + video_only + audio_only + both > 0.0)) throw ConfigError("scenario mix weights sum to zero");
  if (!(video_max >= 0.0 && video_max <= 1.0 && audio_max >= 0.0 && audio_max <= 1.0)) {
    throw ConfigError("severity caps must lie in [0, 1]");
  }
}

std::array<std::size_t, 3> split_counts(std::size_t total) {
  const std::size_t val = total * 15 / 100;
  const std::size_t test = total * 15 / 100;
  return {total - val - test, val, test};
}

DistortionScenario draw_scenario(const ScenarioMix& mix, std::uint64_t seed, std::uint64_t stream, std::size_t index) {
  const std::uint64_t clip_seed = numerics::mix_seed(seed, (stream << 40) | index);
  std::mt19937_64 rng(clip_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double total = mix.clean + mix.video_only + mix.audio_only + mix.both;
  const double pick = unit(rng) * total;
  DistortionScenario s;
  s.seed = numerics::mix_seed(clip_seed, 1);
  const double sv = unit(rng) * mix.video_max;
  const double sa = unit(rng) * mix.audio_max;
  if (pick < mix.clean) {
    s.mode = DistortionMode::clean;
  } else if (pick < mix.clean + mix.video_only) {
    s.mode = DistortionMode::video_only;
    s.video_severity = sv;
  } else if (pick < mix.clean + mix.video_only + mix.audio_only) {
    s.mode = DistortionMode::audio_only;
    s.audio_severity = sa;
  } else {
    s.mode = DistortionMode::both;
    s.video_severity = sv;
    s.audio_severity = sa;
  }
  return s;
}

std::vector<ClipSample> generate_set(std::size_t n, const ScenarioMix& mix, const GeneratorSpec& spec,
                                     std::uint64_t seed, std::uint64_t stream) {
  mix.validate();
  std::vector<ClipSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(generate_clip(draw_scenario(mix, seed, stream, i), spec));
  return out;
}

DatasetSplit generate_split(std::size_t n_train, std::size_t n_val, std::size_t n_test, const ScenarioMix& mix,
                            const GeneratorSpec& spec, std::uint64_t seed) {
  if (n_train == 0 || n_val == 0 || n_test == 0) throw ConfigError("split sizes must be positive");
  DatasetSplit split;
  split.train = generate_set(n_train, mix, spec, seed, 0);
  split.val = generate_set(n_val, mix, spec, seed, 1);
  split.test = generate_set(n_test, mix, spec, seed, 2);
  return split;
}

}  // namespace avqa::synth
