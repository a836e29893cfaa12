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

#include "avqa/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "avqa/adam.hpp"
#include "avqa/error.hpp"
#include "avqa/metrics.hpp"

namespace avqa::model {

TrainHyper TrainHyper::desk() { return TrainHyper{}; }

TrainHyper TrainHyper::paper() {
  TrainHyper h;
  h.learning_rate = 5e-5;
  h.preset = "paper";
  return h;
}

void TrainHyper::validate() const {
  numerics::AdamHyper{learning_rate, beta1, beta2, epsilon, weight_decay}.validate();
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (max_epochs == 0) throw ConfigError("max_epochs must be positive");
}

double safe_plcc(std::span<const double> pred, std::span<const double> mos) {
  try {
    return metrics::plcc(pred, mos);
  } catch (const DegenerateInputError&) {
    return 0.0;
  }
}

double safe_srocc(std::span<const double> pred, std::span<const double> mos) {
  try {
    return metrics::srocc(pred, mos);
  } catch (const DegenerateInputError&) {
    return 0.0;
  }
}

TrainResult train(std::span<const ClipSample> train_set, std::span<const ClipSample> val_set, const ModelConfig& cfg,
                  const TrainHyper& hyper) {
  if (train_set.empty() || val_set.empty()) throw PreconditionError("train: training and validation sets must be non-empty");
  hyper.validate();

  AvqaModel model(cfg);
  model.check_batch(train_set);
  model.check_batch(val_set);

  const std::vector<numerics::Parameter*> params = model.trainable_parameters();
  const numerics::AdamHyper adam{hyper.learning_rate, hyper.beta1, hyper.beta2, hyper.epsilon, hyper.weight_decay};
  std::vector<numerics::AdamState> states;
  for (const numerics::Parameter* p : params) states.push_back(numerics::AdamState::for_parameter(p->tensor, adam));

  std::vector<double> train_mos, val_mos;
  for (const ClipSample& s : train_set) train_mos.push_back(s.mos);
  for (const ClipSample& s : val_set) val_mos.push_back(s.mos);

  std::mt19937_64 shuffle_rng(numerics::mix_seed(cfg.seed, 0x5A));
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result{model, {}, 0, -2.0, 0.0, false};
  std::vector<ClipSample> batch;
  std::vector<double> targets;

  for (std::size_t epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), begin + hyper.batch_size);
      batch.clear();
      targets.clear();
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(train_set[order[i]]);
        targets.push_back(train_set[order[i]].mos);
      }
      for (numerics::Parameter* p : params) p->tensor.zero_grad();
      numerics::Tape tape(true);
      const ForwardOutput f = model.forward(tape, batch);
      const LossValue loss = total_loss(f.score, targets, cfg.lambda_pcc);
      const double value = loss.loss.item();
      if (!std::isfinite(value)) {
        throw EvaluationError("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", step " +
                              std::to_string(steps + 1));
      }
      if (loss.pcc_fallback) ++rec.pcc_fallbacks;
      tape.backward(loss.loss);
      numerics::adam_step(params, states);
      loss_sum += value;
      ++steps;
    }
    rec.train_loss = loss_sum / static_cast<double>(steps);
    rec.train_set_loss = total_loss(model.predict_scores(train_set), train_mos, cfg.lambda_pcc);

    const std::vector<double> pred = model.predict_scores(val_set);
    rec.val_plcc = safe_plcc(pred, val_mos);
    rec.val_srocc = safe_srocc(pred, val_mos);
    double mse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) mse += (pred[i] - val_mos[i]) * (pred[i] - val_mos[i]);
    rec.val_mse = mse / static_cast<double>(pred.size());
    result.history.push_back(rec);

    const bool better = rec.val_srocc > result.best_val_srocc ||
                        (rec.val_srocc == result.best_val_srocc && rec.val_mse < result.best_val_mse);
    if (better) {
      result.best_val_srocc = rec.val_srocc;
      result.best_val_mse = rec.val_mse;
      result.best_epoch = epoch;
      result.model = model;
    } else if (epoch - result.best_epoch >= hyper.patience) {
      result.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace avqa::model
