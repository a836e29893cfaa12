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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "avqa/error.hpp"
#include "avqa/model.hpp"
#include "avqa/synth.hpp"
#include "avqa/train.hpp"

using namespace avqa;
using namespace avqa::model;

namespace {

struct Data {
  std::vector<ClipSample> train, val;
};

Data tiny(std::size_t n_train = 24, std::size_t n_val = 12) {
  const auto spec = synth::GeneratorSpec::make_default(0);
  return {synth::generate_set(n_train, synth::ScenarioMix{}, spec, 12, 0),
          synth::generate_set(n_val, synth::ScenarioMix{}, spec, 12, 1)};
}

ModelConfig cfg(std::uint64_t seed) {
  auto c = synth::GeneratorSpec::make_default(0).model_config();
  c.seed = seed;
  return c;
}

TrainHyper quick(std::size_t max_epochs, std::size_t patience) {
  auto h = TrainHyper::desk();
  h.max_epochs = max_epochs;
  h.patience = patience;
  return h;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

}  // namespace

TEST_SUITE("train") {

TEST_CASE("presets") {
  const auto paper = TrainHyper::paper();
  CHECK(paper.learning_rate == 5e-5);
  CHECK(paper.batch_size == 6);
  CHECK(paper.weight_decay == 5e-3);
  CHECK(paper.patience == 20);
  const auto desk = TrainHyper::desk();
  CHECK(desk.learning_rate == 1e-3);
  CHECK(desk.max_epochs == 200);
  CHECK(desk.batch_size == 6);
  CHECK(desk.patience == 20);
}

TEST_CASE("training loss falls over the first epochs") {
  const auto d = tiny();
  std::vector<double> mos;
  for (const auto& s : d.train) mos.push_back(s.mos);
  AvqaModel init(cfg(0));
  const double initial = total_loss(init.predict_scores(d.train), mos, 0.15);
  const auto r = train(d.train, d.val, cfg(0), quick(5, 20));
  REQUIRE(r.history.size() == 5);
  CHECK(r.history[0].train_set_loss <= initial);
  for (std::size_t e = 1; e < 5; ++e) CHECK(r.history[e].train_set_loss <= r.history[e - 1].train_set_loss);
  CHECK(r.history[4].train_loss < r.history[0].train_loss);
}

TEST_CASE("early stopping and best checkpoint") {
  const auto d = tiny(30, 12);
  const auto r = train(d.train, d.val, cfg(1), quick(60, 4));
  REQUIRE_FALSE(r.history.empty());
  CHECK(r.history.size() <= 60);
  for (std::size_t e = 0; e < r.history.size(); ++e) CHECK(r.history[e].epoch == e + 1);
  CHECK(r.best_epoch >= 1);
  CHECK(r.history.size() - r.best_epoch <= 4);
  if (r.early_stopped) CHECK(r.history.size() - r.best_epoch == 4);
  double best = -2.0;
  for (const auto& h : r.history) best = std::max(best, h.val_srocc);
  CHECK(r.best_val_srocc == best);
  CHECK(r.history[r.best_epoch - 1].val_srocc == best);
  // The returned parameters are those of the best epoch.
  auto m = r.model;
  std::vector<double> mos;
  for (const auto& s : d.val) mos.push_back(s.mos);
  CHECK(safe_srocc(m.predict_scores(d.val), mos) == r.best_val_srocc);
}

TEST_CASE("same seed and data give an identical history") {
  const auto d = tiny();
  const auto a = train(d.train, d.val, cfg(2), quick(4, 20));
  const auto b = train(d.train, d.val, cfg(2), quick(4, 20));
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) {
    CHECK(same_bits(a.history[e].train_loss, b.history[e].train_loss));
    CHECK(same_bits(a.history[e].val_plcc, b.history[e].val_plcc));
    CHECK(same_bits(a.history[e].val_srocc, b.history[e].val_srocc));
  }
  auto ma = a.model, mb = b.model;
  const auto pa = ma.parameters(), pb = mb.parameters();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->tensor.values == pb[i]->tensor.values);
  const auto c = train(d.train, d.val, cfg(3), quick(4, 20));
  CHECK_FALSE(same_bits(c.history[0].train_loss, a.history[0].train_loss));
}

TEST_CASE("invalid training inputs") {
  const auto d = tiny();
  auto h = quick(2, 2);
  h.batch_size = 0;
  CHECK_THROWS(train(d.train, d.val, cfg(0), h));
  CHECK_THROWS(train(std::vector<ClipSample>{}, d.val, cfg(0), quick(2, 2)));
  CHECK_THROWS(train(d.train, std::vector<ClipSample>{}, cfg(0), quick(2, 2)));
}

TEST_CASE("a non-finite loss aborts with the epoch and step") {
  auto d = tiny();
  d.train[3].mos = std::numeric_limits<double>::quiet_NaN();
  try {
    (void)train(d.train, d.val, cfg(0), quick(2, 2));
    FAIL("expected EvaluationError");
  } catch (const EvaluationError& e) {
    const std::string what = e.what();
    CHECK(what.find("epoch") != std::string::npos);
    CHECK(what.find("step") != std::string::npos);
  }
}

TEST_CASE("safe correlations treat constant predictions as uncorrelated") {
  const std::vector<double> flat{0.5, 0.5, 0.5, 0.5}, mos{0.1, 0.4, 0.2, 0.9};
  CHECK(safe_plcc(flat, mos) == 0.0);
  CHECK(safe_srocc(flat, mos) == 0.0);
}

}  // TEST_SUITE
