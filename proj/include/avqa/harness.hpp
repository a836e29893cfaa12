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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "avqa/error.hpp"
#include "avqa/model.hpp"
#include "avqa/synth.hpp"
#include "avqa/train.hpp"

// Experiment commands behind the `avqa` tool. Each command writes its outputs
// under a caller-supplied directory, prints a short summary to `out`, and
// returns a process exit code; errors are thrown and mapped by exit_code_for().
namespace avqa::harness {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitIo = 3,
  kExitFormat = 4,  // malformed or misaligned input data
  kExitCheckFailed = 5,
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Maps the error hierarchy onto exit codes.
int exit_code_for(const std::exception& e) noexcept;

// Synthetic data shared by synth-gen and asymmetric.
struct DataSpec {
  std::size_t clips = 200;
  std::uint64_t dataset_seed = 0;
  std::uint64_t profile_seed = 0;
  std::string mix = "mixed";  // mixed | clean | video_only | audio_only | both
  double video_max = 1.0;
  double audio_max = 1.0;

  synth::ScenarioMix scenario_mix() const;
  synth::GeneratorSpec generator() const;
  std::string to_text() const;
};

struct Toggles {
  bool avm = true;
  bool vcm = true;
  bool acm = true;
};

// Training preset plus per-field overrides.
struct HyperOptions {
  bool paper = false;
  std::optional<double> learning_rate;
  std::optional<std::size_t> batch_size;
  std::optional<std::size_t> max_epochs;
  std::optional<std::size_t> patience;
  double lambda_pcc = 0.15;

  model::TrainHyper resolve() const;
  std::string to_text() const;
};

struct SynthGenOptions {
  DataSpec data;
  std::string out_dir;
};

struct TrainOptions {
  std::string data_dir;
  std::string out_dir;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  Toggles toggles;
  HyperOptions hyper;
};

struct EvalOptions {
  std::string checkpoint;
  std::string dataset;
  std::string out_dir;
};

struct AblateOptions {
  std::string data_dir;
  std::string out_dir;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  HyperOptions hyper;
};

struct AsymmetricOptions {
  std::string out_dir;
  std::size_t runs = 5;
  std::uint64_t dataset_seed = 0;
  std::uint64_t profile_seed = 0;
  std::size_t n_train = 140;
  std::size_t n_val = 30;
  std::size_t n_test = 60;  // per test condition
  double video_severity = 0.7;
  double audio_severity = 0.7;
  HyperOptions hyper;
};

struct SignificanceOptions {
  std::string pred_a;
  std::string pred_b;
  std::string mos;
  std::string out_dir;
  double alpha = 0.05;
};

struct GradcheckOptions {
  std::string out_dir;  // optional; the report is always printed
  std::size_t batch = 2;
  double epsilon = 1e-5;
  double threshold = 1e-5;
  std::uint64_t model_seed = 0;
  std::uint64_t dataset_seed = 0;
  std::uint64_t profile_seed = 0;
  bool inject_fault = false;  // scale one analytic gradient entry per group by 1.1
};

// The five toggle settings of the ablation grid, baseline first.
std::vector<Toggles> ablation_grid();
std::string toggle_label(const Toggles& t);

// Model configuration matching the dimensions of `samples`.
model::ModelConfig config_for(std::span<const model::ClipSample> samples, const Toggles& t, double lambda_pcc,
                              std::uint64_t seed);

int cmd_synth_gen(const SynthGenOptions& opt, std::ostream& out);
int cmd_train(const TrainOptions& opt, std::ostream& out);
int cmd_eval(const EvalOptions& opt, std::ostream& out);
int cmd_ablate(const AblateOptions& opt, std::ostream& out);
int cmd_asymmetric(const AsymmetricOptions& opt, std::ostream& out);
int cmd_significance(const SignificanceOptions& opt, std::ostream& out);
int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out);

// Writes <dir>/run-meta.txt: command, hash of the canonical config text, seeds,
// preset, then the config text itself.
void write_run_meta(const std::string& dir, const std::string& command, const std::string& config_text,
                    const std::vector<std::uint64_t>& seeds, const std::string& preset);

}  // namespace avqa::harness
