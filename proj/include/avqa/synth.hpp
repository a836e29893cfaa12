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

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "avqa/model.hpp"

// Synthetic asymmetric-distortion generator. Each clip draws a latent content
// vector shared by both modalities; video severity attenuates and corrupts the
// visual features and raises artifact probabilities, audio severity does the
// same to the audio embedding and lowers the speech-quality cue. MOS is a
// clamped linear function of the two severities plus Gaussian noise.
namespace avqa::synth {

using model::ClipSample;

enum class DistortionMode { clean, video_only, audio_only, both };

std::string mode_name(DistortionMode m);
DistortionMode parse_mode(const std::string& s);

struct DistortionScenario {
  DistortionMode mode = DistortionMode::clean;
  double video_severity = 0.0;
  double audio_severity = 0.0;
  std::uint64_t seed = 0;

  // Severities in [0, 1] and zero on the unaffected modality (both zero for
  // clean).
  void validate() const;
};

// Sigmoid-in-severity response of one artifact type, rescaled so the
// probability equals base_rate at severity 0 and peak at severity 1.
struct ArtifactProfile {
  double base_rate = 0.05;
  double peak = 0.9;
  double midpoint = 0.5;
  double slope = 10.0;

  double probability(double severity) const;
};

struct GeneratorSpec {
  std::size_t channels = 32;
  std::size_t height = 4;
  std::size_t width = 4;
  std::size_t audio_dim = 16;
  std::size_t frames = 8;
  std::size_t artifact_types = 10;

  double w_v = 0.6;
  double w_a = 0.4;
  std::vector<ArtifactProfile> profiles;

  double noise_std = 0.02;        // MOS noise
  double artifact_noise = 0.05;   // half-width of uniform noise on artifact probabilities
  double cue_noise = 0.1;         // std of Gaussian noise on the raw audio cue
  double cue_min = 1.0;
  double cue_max = 5.0;

  // Shape of the distortion itself.
  double content_scale_min = 0.5;
  double content_scale_max = 1.5;
  double attenuation = 0.8;        // feature energy factor (1 - attenuation * severity)
  double corruption = 0.5;         // std of additive corruption per unit severity
  double flicker = 1.5;            // std of a per-frame, per-channel offset per unit video severity
  double content_mean = 1.0;       // latent content ~ N(content_mean, content_std^2) per channel
  double content_std = 0.25;
  double texture_std = 0.5;
  double jitter_std = 0.1;

  // Default profiles drawn from `profile_seed`.
  static GeneratorSpec make_default(std::uint64_t profile_seed = 0);

  // Zero MOS, artifact and cue noise.
  GeneratorSpec noiseless() const;

  model::ModelConfig model_config() const;
  void validate() const;
};

ClipSample generate_clip(const DistortionScenario& scenario, const GeneratorSpec& spec);

// Proportions of each mode and the severity cap used when drawing per-clip
// severities uniformly in [0, cap].
struct ScenarioMix {
  double clean = 0.1;
  double video_only = 0.3;
  double audio_only = 0.3;
  double both = 0.3;
  double video_max = 1.0;
  double audio_max = 1.0;

  static ScenarioMix only(DistortionMode m, double video_max = 1.0, double audio_max = 1.0);
  void validate() const;
};

struct DatasetSplit {
  std::vector<ClipSample> train;
  std::vector<ClipSample> val;
  std::vector<ClipSample> test;
};

// 70:15:15 counts for `total` clips; the remainder after flooring the
// validation and test shares goes to training.
std::array<std::size_t, 3> split_counts(std::size_t total);

// Clip seeds come from disjoint streams per split.
DatasetSplit generate_split(std::size_t n_train, std::size_t n_val, std::size_t n_test, const ScenarioMix& mix,
                            const GeneratorSpec& spec, std::uint64_t seed);

// Scenario for one clip of a split (stream 0 = train, 1 = val, 2 = test).
DistortionScenario draw_scenario(const ScenarioMix& mix, std::uint64_t seed, std::uint64_t stream, std::size_t index);

std::vector<ClipSample> generate_set(std::size_t n, const ScenarioMix& mix, const GeneratorSpec& spec,
                                     std::uint64_t seed, std::uint64_t stream);

}  // namespace avqa::synth
