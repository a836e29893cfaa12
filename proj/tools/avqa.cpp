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

// avqa: synthetic data generation, training, evaluation and the experiment
// sweeps of the confidence-aware audio-visual quality model.

#include <iostream>

#include "CLI11.hpp"
#include "avqa/harness.hpp"

namespace h = avqa::harness;

namespace {

void add_hyper(CLI::App* cmd, h::HyperOptions& o) {
  cmd->add_flag("--paper-hparams", o.paper, "Use the published training settings (lr 5e-5) instead of the desk preset");
  cmd->add_option("--lr", o.learning_rate, "Learning rate override");
  cmd->add_option("--batch-size", o.batch_size, "Mini-batch size override");
  cmd->add_option("--max-epochs", o.max_epochs, "Epoch limit override");
  cmd->add_option("--patience", o.patience, "Early-stopping patience override");
  cmd->add_option("--lambda", o.lambda_pcc, "Weight of the Pearson loss term")->capture_default_str();
}

void add_seeds(CLI::App* cmd, std::vector<std::uint64_t>& seeds) {
  cmd->add_option("--seeds", seeds, "Comma-separated model seeds")->delimiter(',')->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Confidence-aware audio-visual quality assessment on synthetic data"};
  app.set_config("--config", "", "INI file with one [section] per subcommand; flags override it");
  app.require_subcommand(1);

  h::SynthGenOptions gen;
  auto* gen_cmd = app.add_subcommand("synth-gen", "Write train/val/test dataset files");
  gen_cmd->add_option("--out", gen.out_dir, "Output directory")->required();
  gen_cmd->add_option("--clips", gen.data.clips, "Total clips, split 70:15:15")->capture_default_str();
  gen_cmd->add_option("--seed", gen.data.dataset_seed, "Dataset seed")->capture_default_str();
  gen_cmd->add_option("--profile-seed", gen.data.profile_seed, "Artifact profile seed")->capture_default_str();
  gen_cmd->add_option("--mix", gen.data.mix, "mixed, clean, video_only, audio_only or both")->capture_default_str();
  gen_cmd->add_option("--video-max", gen.data.video_max, "Largest video severity")->capture_default_str();
  gen_cmd->add_option("--audio-max", gen.data.audio_max, "Largest audio severity")->capture_default_str();

  h::TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train one model per seed");
  train_cmd->add_option("--data", train.data_dir, "Directory written by synth-gen")->required();
  train_cmd->add_option("--out", train.out_dir, "Output directory")->required();
  add_seeds(train_cmd, train.seeds);
  train_cmd->add_option("--avm", train.toggles.avm, "Audio-visual mixer on/off")->capture_default_str();
  train_cmd->add_option("--vcm", train.toggles.vcm, "Visual confidence module on/off")->capture_default_str();
  train_cmd->add_option("--acm", train.toggles.acm, "Audio confidence module on/off")->capture_default_str();
  add_hyper(train_cmd, train.hyper);

  h::EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset file");
  eval_cmd->add_option("--checkpoint", eval.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", eval.dataset, "Dataset file")->required();
  eval_cmd->add_option("--out", eval.out_dir, "Output directory")->required();

  h::AblateOptions ablate;
  auto* ablate_cmd = app.add_subcommand("ablate", "Train and test the five module settings");
  ablate_cmd->add_option("--data", ablate.data_dir, "Directory written by synth-gen")->required();
  ablate_cmd->add_option("--out", ablate.out_dir, "Output directory")->required();
  add_seeds(ablate_cmd, ablate.seeds);
  add_hyper(ablate_cmd, ablate.hyper);

  h::AsymmetricOptions asym;
  auto* asym_cmd = app.add_subcommand("asymmetric", "Train on both-degraded clips, test on single-modality damage");
  asym_cmd->add_option("--out", asym.out_dir, "Output directory")->required();
  asym_cmd->add_option("--runs", asym.runs, "Runs per model")->capture_default_str();
  asym_cmd->add_option("--seed", asym.dataset_seed, "Dataset seed")->capture_default_str();
  asym_cmd->add_option("--profile-seed", asym.profile_seed, "Artifact profile seed")->capture_default_str();
  asym_cmd->add_option("--train-clips", asym.n_train, "Training clips")->capture_default_str();
  asym_cmd->add_option("--val-clips", asym.n_val, "Validation clips")->capture_default_str();
  asym_cmd->add_option("--test-clips", asym.n_test, "Test clips per condition")->capture_default_str();
  asym_cmd->add_option("--video-severity", asym.video_severity, "Largest video severity")->capture_default_str();
  asym_cmd->add_option("--audio-severity", asym.audio_severity, "Largest audio severity")->capture_default_str();
  add_hyper(asym_cmd, asym.hyper);

  h::SignificanceOptions sig;
  auto* sig_cmd = app.add_subcommand("significance", "Paired tests on the absolute errors of two predictors");
  sig_cmd->add_option("--pred-a", sig.pred_a, "Predictions of model A, one per line")->required();
  sig_cmd->add_option("--pred-b", sig.pred_b, "Predictions of model B, one per line")->required();
  sig_cmd->add_option("--mos", sig.mos, "Ground-truth MOS, one per line")->required();
  sig_cmd->add_option("--out", sig.out_dir, "Output directory")->required();
  sig_cmd->add_option("--alpha", sig.alpha, "Significance level")->capture_default_str();

  h::GradcheckOptions grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare reverse-mode gradients with central differences");
  grad_cmd->add_option("--out", grad.out_dir, "Optional output directory");
  grad_cmd->add_option("--batch", grad.batch, "Clips in the checked batch")->capture_default_str();
  grad_cmd->add_option("--epsilon", grad.epsilon, "Central-difference step")->capture_default_str();
  grad_cmd->add_option("--threshold", grad.threshold, "Largest accepted relative error")->capture_default_str();
  grad_cmd->add_option("--seed", grad.model_seed, "Model seed")->capture_default_str();
  grad_cmd->add_option("--data-seed", grad.dataset_seed, "Batch seed")->capture_default_str();
  grad_cmd->add_flag("--inject-fault", grad.inject_fault, "Corrupt one analytic gradient entry per group by +10%");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? h::kExitOk : h::kExitUsage;
  }

  try {
    if (*gen_cmd) return h::cmd_synth_gen(gen, std::cout);
    if (*train_cmd) return h::cmd_train(train, std::cout);
    if (*eval_cmd) return h::cmd_eval(eval, std::cout);
    if (*ablate_cmd) return h::cmd_ablate(ablate, std::cout);
    if (*asym_cmd) return h::cmd_asymmetric(asym, std::cout);
    if (*sig_cmd) return h::cmd_significance(sig, std::cout);
    if (*grad_cmd) return h::cmd_gradcheck(grad, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "avqa: " << e.what() << '\n';
    return h::exit_code_for(e);
  }
  return h::kExitUsage;
}
