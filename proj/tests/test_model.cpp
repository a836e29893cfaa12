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
#include <random>
#include <string>
#include <vector>

#include "avqa/error.hpp"
#include "avqa/model.hpp"
#include "avqa/ops.hpp"
#include "avqa/synth.hpp"
#include "support.hpp"

using namespace avqa;
using namespace avqa::model;
using avqa::testing::uniform_values;

namespace {

// Pearson correlation straight from the definition.
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double mse(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return s / static_cast<double>(x.size());
}

std::vector<ClipSample> samples(std::size_t n, std::uint64_t seed = 3) {
  return synth::generate_set(n, synth::ScenarioMix{}, synth::GeneratorSpec::make_default(0), seed, 0);
}

ModelConfig config(bool avm, bool vcm, bool acm, std::uint64_t seed = 1) {
  ModelConfig cfg = synth::GeneratorSpec::make_default(0).model_config();
  cfg.use_avm = avm;
  cfg.use_vcm = vcm;
  cfg.use_acm = acm;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("correlation loss examples") {
  const std::vector<double> t{0.1, 0.5, 0.3, 0.9};
  CHECK(pcc_loss(t, t) == doctest::Approx(0.0).epsilon(1e-15));
  std::vector<double> neg(t.size());
  std::transform(t.begin(), t.end(), neg.begin(), [](double v) { return -v; });
  CHECK(pcc_loss(neg, t) == doctest::Approx(2.0).epsilon(1e-15));
  const std::vector<double> p{1, 2, 3}, y{1, 2, 4};
  CHECK(pcc_loss(p, y) == doctest::Approx(1.0 - pearson(p, y)).epsilon(1e-14));
  CHECK(pcc_loss(p, y) == doctest::Approx(0.01802).epsilon(1e-3));
}

TEST_CASE("total loss examples") {
  const std::vector<double> p{0.2, 0.8}, y{0.8, 0.2};
  CHECK(total_loss(p, y, 0.15) == doctest::Approx(0.66).epsilon(1e-14));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto a = uniform_values(rng, 6, 0.0, 1.0);
    const auto b = uniform_values(rng, 6, 0.0, 1.0);
    CHECK(total_loss(a, b, 0.0) == mse(a, b));
  }
}

TEST_CASE("correlation loss range and affine invariance") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> scale(0.1, 10.0), shift(-5.0, 5.0);
  for (int i = 0; i < 500; ++i) {
    const auto p = uniform_values(rng, 2 + static_cast<std::size_t>(i % 9));
    const auto y = uniform_values(rng, p.size());
    const double l = pcc_loss(p, y);
    CHECK(l >= 0.0);
    CHECK(l <= 2.0);
    const double a = scale(rng), b = shift(rng);
    std::vector<double> q(p.size());
    std::transform(p.begin(), p.end(), q.begin(), [&](double v) { return a * v + b; });
    CHECK(std::abs(pcc_loss(q, y) - l) < 1e-12);
  }
}

TEST_CASE("total loss vanishes exactly at the target") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto y = uniform_values(rng, 6, 0.0, 1.0);
    CHECK(total_loss(y, y, 0.15) == 0.0);
    auto p = y;
    p[static_cast<std::size_t>(i) % 6] += 1e-3;
    CHECK(total_loss(p, y, 0.15) > 0.0);
  }
}

TEST_CASE("zero-variance batches fall back to mean squared error") {
  const std::vector<double> flat{0.5, 0.5, 0.5}, y{0.1, 0.4, 0.8};
  CHECK_THROWS_AS((void)pcc_loss(flat, y), ZeroVarianceError);
  CHECK_THROWS_AS((void)pcc_loss(y, flat), ZeroVarianceError);
  CHECK_THROWS_AS((void)pcc_loss(std::vector<double>{1.0}, std::vector<double>{2.0}), PreconditionError);
  bool fallback = false;
  CHECK(total_loss(flat, y, 0.15, &fallback) == mse(flat, y));
  CHECK(fallback);
  numerics::Tape tape;
  const auto lv = total_loss(tape.constant({3, 1}, flat), y, 0.15);
  CHECK(lv.pcc_fallback);
  CHECK(lv.loss.item() == mse(flat, y));
}

TEST_CASE("loss gradient with respect to predictions") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    numerics::Parameter pred{"pred", numerics::Tensor({6, 1}, uniform_values(rng, 6, 0.0, 1.0), true)};
    const auto y = uniform_values(rng, 6, 0.0, 1.0);
    std::vector<numerics::Parameter*> ps{&pred};
    const double err = numerics::finite_difference_check(
        [&](numerics::Tape& t) { return total_loss(t.bind(pred), y, 0.15).loss; }, ps);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("taped and plain losses agree") {
  std::mt19937_64 rng(5);
  const auto p = uniform_values(rng, 6, 0.0, 1.0);
  const auto y = uniform_values(rng, 6, 0.0, 1.0);
  numerics::Tape tape;
  CHECK(total_loss(tape.constant({6, 1}, p), y, 0.15).loss.item() == total_loss(p, y, 0.15));
  CHECK(pcc_loss(tape.constant({6, 1}, p), y).item() == pcc_loss(p, y));
}

TEST_CASE("disabled visual confidence ignores artifacts") {
  auto batch = samples(6);
  AvqaModel m(config(true, false, true));
  const auto base = m.predict_scores(batch);
  std::mt19937_64 rng(6);
  for (auto& s : batch) s.artifacts.probs = uniform_values(rng, s.artifacts.probs.size(), 0.0, 1.0);
  CHECK(m.predict_scores(batch) == base);

  AvqaModel on(config(true, true, true));
  auto fresh = samples(6);
  const auto before = on.predict_scores(fresh);
  for (auto& s : fresh) s.artifacts.probs = uniform_values(rng, s.artifacts.probs.size(), 0.0, 1.0);
  CHECK(on.predict_scores(fresh) != before);
}

TEST_CASE("disabled audio confidence ignores the cue") {
  auto batch = samples(6);
  AvqaModel m(config(true, true, false));
  const auto base = m.predict_scores(batch);
  for (auto& s : batch) s.audio_cue.raw_score = 6.0 - s.audio_cue.raw_score;
  CHECK(m.predict_scores(batch) == base);

  AvqaModel on(config(true, true, true));
  auto fresh = samples(6);
  const auto before = on.predict_scores(fresh);
  for (auto& s : fresh) s.audio_cue.raw_score = 6.0 - s.audio_cue.raw_score;
  CHECK(on.predict_scores(fresh) != before);
}

TEST_CASE("disabled mixer ignores mixer parameters") {
  const auto batch = samples(6);
  std::mt19937_64 rng(7);
  for (bool vcm : {false, true})
    for (bool acm : {false, true}) {
      AvqaModel m(config(false, vcm, acm));
      const auto base = m.predict_scores(batch);
      for (auto* p : m.mixer_params().parameters()) p->tensor.values = uniform_values(rng, p->tensor.size());
      CHECK(m.predict_scores(batch) == base);
    }
  AvqaModel on(config(true, true, true));
  const auto before = on.predict_scores(batch);
  for (auto* p : on.mixer_params().parameters()) p->tensor.values = uniform_values(rng, p->tensor.size());
  CHECK(on.predict_scores(batch) != before);
}

TEST_CASE("batch permutation permutes predictions") {
  const auto batch = samples(5);
  const std::vector<std::size_t> order{3, 1, 4, 0, 2};
  std::vector<ClipSample> shuffled;
  for (std::size_t i : order) shuffled.push_back(batch[i]);
  for (bool avm : {false, true}) {
    AvqaModel m(config(avm, true, true));
    const auto a = m.predict(batch);
    const auto b = m.predict(shuffled);
    for (std::size_t i = 0; i < order.size(); ++i) {
      CHECK(b[i].score == a[order[i]].score);
      CHECK(b[i].confidences.r_v == a[order[i]].confidences.r_v);
      CHECK(b[i].alpha_mean == a[order[i]].alpha_mean);
    }
  }
}

TEST_CASE("predictions and confidences stay in range") {
  const auto batch = samples(12);
  AvqaModel m(config(true, true, true, 5));
  for (const auto& p : m.predict(batch)) {
    CHECK(p.score > 0.0);
    CHECK(p.score < 1.0);
    CHECK(p.confidences.r_v >= 0.0);
    CHECK(p.confidences.r_v <= 1.0);
    CHECK(p.confidences.r_a >= 0.0);
    CHECK(p.confidences.r_a <= 1.0);
    CHECK(p.confidences.frame_scores.size() == 8);
    CHECK(p.alpha_mean.size() == 32);
  }
  AvqaModel late(config(false, false, false, 5));
  for (const auto& p : late.predict(batch)) {
    CHECK(p.confidences.r_v == 1.0);
    CHECK(p.confidences.r_a == 1.0);
    CHECK(p.alpha_mean.empty());
  }
}

TEST_CASE("chunked prediction matches a single batch") {
  const auto batch = samples(10);
  AvqaModel m(config(true, true, true));
  std::vector<double> whole;
  for (const auto& p : m.predict(batch)) whole.push_back(p.score);
  CHECK(m.predict_scores(batch, 3) == whole);
}

TEST_CASE("dimension errors name the sample") {
  auto batch = samples(4);
  batch[2].audio.pop_back();
  AvqaModel m(config(true, true, true));
  try {
    (void)m.predict(batch);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    CHECK(std::string(e.what()).find("sample 2") != std::string::npos);
  }
  auto bad_visual = samples(3);
  bad_visual[1].visual = numerics::Tensor({7, 32, 4, 4}, std::vector<double>(7 * 32 * 16, 0.0));
  CHECK_THROWS_WITH_AS((void)m.predict(bad_visual), doctest::Contains("sample 1"), DimensionError);
  CHECK_THROWS_AS((void)m.predict(std::vector<ClipSample>{}), PreconditionError);
}

TEST_CASE("configuration text round trip") {
  ModelConfig cfg = config(true, false, true, 42);
  cfg.lambda_pcc = 0.3;
  cfg.fusion_hidden = 17;
  const auto text = cfg.to_text();
  const auto back = ModelConfig::parse(text);
  CHECK(back.to_text() == text);
  CHECK(back.seed == 42);
  CHECK_FALSE(back.use_vcm);
  CHECK(back.toggle_label() == "+,-,+");
  CHECK_THROWS_AS((void)ModelConfig::parse("channels 3\n"), ConfigError);
}

TEST_CASE("same seed builds identical models") {
  AvqaModel a(config(true, true, true, 9));
  AvqaModel b(config(true, true, true, 9));
  AvqaModel c(config(true, true, true, 10));
  const auto pa = a.parameters(), pb = b.parameters(), pc = c.parameters();
  REQUIRE(pa.size() == pb.size());
  bool differs = false;
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i]->name == pb[i]->name);
    CHECK(pa[i]->tensor.values == pb[i]->tensor.values);
    if (pa[i]->tensor.values != pc[i]->tensor.values) differs = true;
  }
  CHECK(differs);
}

}  // TEST_SUITE
