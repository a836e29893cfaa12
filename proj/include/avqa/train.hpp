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
#include <span>
#include <string>
#include <vector>

#include "avqa/model.hpp"

namespace avqa::model {

struct TrainHyper {
  double learning_rate = 1e-3;
  std::size_t batch_size = 6;
  double weight_decay = 5e-3;
  std::size_t patience = 20;
  std::size_t max_epochs = 200;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::string preset = "desk";

  // Small-model defaults: lr 1e-3, at most 200 epochs.
  static TrainHyper desk();
  // Published settings: lr 5e-5, batch 6, weight decay 5e-3, patience 20.
  static TrainHyper paper();

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;      // mean mini-batch loss during the epoch
  double train_set_loss = 0.0;  // loss over the whole training set after the epoch
  double val_plcc = 0.0;
  double val_srocc = 0.0;
  double val_mse = 0.0;
  std::size_t pcc_fallbacks = 0;  // batches trained on MSE alone
};

struct TrainResult {
  AvqaModel model;  // parameters of the best validation epoch
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  double best_val_srocc = 0.0;
  double best_val_mse = 0.0;
  bool early_stopped = false;
};

// Adam with decoupled weight decay on mini-batches reshuffled each epoch
// (shuffle seeded from cfg.seed). Validation SROCC selects the checkpoint, ties
// broken by lower validation MSE; training stops after `patience` epochs
// without improvement. A non-finite loss aborts with EvaluationError naming the
// epoch and step.
TrainResult train(std::span<const ClipSample> train_set, std::span<const ClipSample> val_set, const ModelConfig& cfg,
                  const TrainHyper& hyper);

// Correlations that treat a constant prediction vector as uncorrelated (0).
double safe_plcc(std::span<const double> pred, std::span<const double> mos);
double safe_srocc(std::span<const double> pred, std::span<const double> mos);

}  // namespace avqa::model
