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

#include <cfloat>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "avqa/adam.hpp"
#include "avqa/error.hpp"
#include "avqa/gradcheck.hpp"
#include "avqa/ops.hpp"
#include "support.hpp"

using namespace avqa;
using namespace avqa::numerics;
using avqa::testing::random_parameter;
using avqa::testing::uniform_values;

namespace {

using Build = std::function<Var(Tape&, const std::vector<Var>&)>;

// sum(w .* op(inputs)) for a fixed random weight vector w, checked by central
// differences over every input entry.
double weighted_error(std::vector<Parameter>& inputs, const Build& build, std::mt19937_64& rng) {
  const auto weights = uniform_values(rng, 1024);
  std::vector<Parameter*> ptrs;
  for (auto& p : inputs) ptrs.push_back(&p);
  const ScalarFn f = [&](Tape& tape) {
    std::vector<Var> in;
    for (auto& p : inputs) in.push_back(tape.bind(p));
    const Var y = build(tape, in);
    const Var w = tape.constant(y.shape(), std::vector<double>(weights.begin(), weights.begin() + y.size()));
    return sum(mul(y, w));
  };
  return finite_difference_check(f, ptrs, 1e-5);
}

std::size_t dim(std::mt19937_64& rng, std::size_t lo = 1, std::size_t hi = 4) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Brute-force same-padded depthwise convolution, taps summed left to right.
std::vector<double> conv_oracle(const std::vector<double>& a, std::size_t frames, std::size_t channels,
                                const std::vector<double>& kernel, std::size_t width) {
  std::vector<double> out(frames * channels, 0.0);
  const long half = static_cast<long>(width / 2);
  for (std::size_t t = 0; t < frames; ++t)
    for (std::size_t k = 0; k < channels; ++k) {
      double acc = 0.0;
      for (std::size_t j = 0; j < width; ++j) {
        const long src = static_cast<long>(t) + static_cast<long>(j) - half;
        if (src < 0 || src >= static_cast<long>(frames)) continue;
        acc += kernel[k * width + j] * a[static_cast<std::size_t>(src) * channels + k];
      }
      out[t * channels + k] = acc;
    }
  return out;
}

std::vector<double> values_of(const Var& v) { return {v.value().begin(), v.value().end()}; }

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("matmul hand examples") {
  Tape tape;
  const auto id = tape.constant({2, 2}, {1, 0, 0, 1});
  const auto b = tape.constant({2, 2}, {3, 4, 5, 6});
  CHECK(values_of(matmul(id, b)) == std::vector<double>{3, 4, 5, 6});
  const auto r = matmul(tape.constant({1, 2}, {1, 2}), tape.constant({2, 1}, {3, 4}));
  CHECK(r.shape() == Shape{1, 1});
  CHECK(r.item() == 11.0);
}

TEST_CASE("matmul shape mismatch names both shapes") {
  Tape tape;
  const auto a = tape.constant({2, 3}, std::vector<double>(6, 1.0));
  const auto b = tape.constant({2, 2}, std::vector<double>(4, 1.0));
  try {
    (void)matmul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string what = e.what();
    CHECK(what.find("[2x3]") != std::string::npos);
    CHECK(what.find("[2x2]") != std::string::npos);
  }
}

TEST_CASE("gradient of sum(AB) w.r.t. A is ones * B^T") {
  std::mt19937_64 rng(11);
  auto a = random_parameter(rng, "A", {3, 4});
  auto b = random_parameter(rng, "B", {4, 2});
  a.tensor.zero_grad();
  b.tensor.zero_grad();
  {
    Tape tape;
    const auto y = sum(matmul(tape.bind(a), tape.bind(b)));
    tape.backward(y);
  }
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      const double expected = b.tensor.values[k * 2] + b.tensor.values[k * 2 + 1];
      CHECK(a.tensor.grad[i * 4 + k] == doctest::Approx(expected).epsilon(1e-14));
    }
  std::vector<Parameter*> ptrs{&a, &b};
  const double err = finite_difference_check([&](Tape& t) { return sum(matmul(t.bind(a), t.bind(b))); }, ptrs);
  CHECK(err < 1e-6);
}

TEST_CASE("sigmoid values and saturation") {
  CHECK(sigmoid(0.0) == 0.5);
  const double lo = sigmoid(-50.0);
  CHECK(lo < 1e-20);
  CHECK(lo > 0.0);
  CHECK_FALSE(std::isnan(lo));
  for (double x : {-DBL_MAX, -1e300, -745.0, -500.0, -40.0, 0.0, 40.0, 500.0, 1e300, DBL_MAX}) {
    const double y = sigmoid(x);
    CHECK(y > 0.0);
    CHECK(y < 1.0);
  }
  Tape tape;
  const auto v = sigmoid(tape.constant({1, 3}, {-1e300, 0.0, 1e300}));
  for (double y : v.value()) {
    CHECK(y > 0.0);
    CHECK(y < 1.0);
  }
}

TEST_CASE("sigmoid gradient at zero") {
  Parameter x{"x", Tensor({1}, {0.0}, true)};
  x.tensor.zero_grad();
  {
    Tape tape;
    const auto y = sum(sigmoid(tape.bind(x)));
    tape.backward(y);
  }
  const double eps = 1e-5;
  const double numeric = (sigmoid(eps) - sigmoid(-eps)) / (2 * eps);
  CHECK(x.tensor.grad[0] == 0.25);
  CHECK(std::abs(x.tensor.grad[0] - numeric) < 1e-9);
}

TEST_CASE("global average pool") {
  Tape tape;
  const auto c = global_average_pool(tape.constant({2, 3, 2, 2}, std::vector<double>(24, -1.75)));
  CHECK(c.shape() == Shape{2, 3});
  for (double v : c.value()) CHECK(v == -1.75);
  CHECK(global_average_pool(tape.constant({1, 1, 2, 2}, {1, 2, 3, 4})).item() == 2.5);
  CHECK_THROWS_AS((void)global_average_pool(tape.constant({1, 2, 0, 3}, {})), DegenerateInputError);
  CHECK_THROWS_AS((void)global_average_pool(tape.constant({2, 2}, {1, 2, 3, 4})), DimensionError);
}

TEST_CASE("global average pool spreads gradient uniformly") {
  std::mt19937_64 rng(5);
  auto v = random_parameter(rng, "v", {2, 3, 2, 3});
  const auto w = uniform_values(rng, 6);
  v.tensor.zero_grad();
  {
    Tape tape;
    const auto y = sum(mul(global_average_pool(tape.bind(v)), tape.constant({2, 3}, w)));
    tape.backward(y);
  }
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t p = 0; p < 6; ++p) CHECK(v.tensor.grad[i * 6 + p] == doctest::Approx(w[i] / 6.0).epsilon(1e-14));
  std::vector<Parameter*> ptrs{&v};
  const double err = finite_difference_check(
      [&](Tape& t) { return sum(mul(global_average_pool(t.bind(v)), t.constant({2, 3}, w))); }, ptrs);
  CHECK(err < 1e-6);
}

TEST_CASE("temporal convolution hand examples") {
  Tape tape;
  std::mt19937_64 rng(3);
  const auto a = uniform_values(rng, 6 * 3);
  std::vector<double> identity(3 * 3, 0.0);
  for (std::size_t k = 0; k < 3; ++k) identity[k * 3 + 1] = 1.0;
  const auto same = depthwise_temporal_conv1d(tape.constant({6, 3}, a), tape.constant({3, 3}, identity));
  CHECK(values_of(same) == a);

  const double third = 1.0 / 3.0;
  const auto box = depthwise_temporal_conv1d(tape.constant({4, 1}, {0, 3, 0, 0}),
                                             tape.constant({1, 3}, {third, third, third}));
  const auto out = values_of(box);
  REQUIRE(out.size() == 4);
  CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out[2] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out[3] == 0.0);
}

TEST_CASE("temporal convolution errors") {
  Tape tape;
  const auto a = tape.constant({4, 2}, std::vector<double>(8, 1.0));
  CHECK_THROWS_AS((void)depthwise_temporal_conv1d(a, tape.constant({2, 4}, std::vector<double>(8, 0.25))),
                  ConfigError);
  CHECK_THROWS_AS((void)depthwise_temporal_conv1d(a, tape.constant({3, 3}, std::vector<double>(9, 0.0))),
                  DimensionError);
  CHECK_THROWS_AS(
      (void)depthwise_temporal_conv1d(tape.constant({0, 2}, {}), tape.constant({2, 3}, std::vector<double>(6, 0.0))),
      DegenerateInputError);
}

TEST_CASE("temporal convolution equals the nested-loop oracle exactly") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t frames = dim(rng, 1, 12), channels = dim(rng, 1, 6), width = 2 * dim(rng, 0, 3) + 1;
    const auto a = uniform_values(rng, frames * channels);
    const auto kernel = uniform_values(rng, channels * width);
    Tape tape;
    const auto out = depthwise_temporal_conv1d(tape.constant({frames, channels}, a),
                                               tape.constant({channels, width}, kernel));
    CHECK(values_of(out) == conv_oracle(a, frames, channels, kernel, width));
  }
}

TEST_CASE("every differentiable op passes the finite-difference check") {
  std::mt19937_64 rng(2026);
  struct Case {
    const char* name;
    std::function<std::pair<std::vector<Parameter>, Build>(std::mt19937_64&)> make;
  };
  const std::vector<Case> cases{
      {"matmul",
       [](std::mt19937_64& r) {
         const std::size_t m = dim(r), k = dim(r), n = dim(r);
         return std::pair{std::vector{random_parameter(r, "a", {m, k}), random_parameter(r, "b", {k, n})},
                          Build([](Tape&, const std::vector<Var>& in) { return matmul(in[0], in[1]); })};
       }},
      {"add",
       [](std::mt19937_64& r) {
         const std::size_t m = dim(r), n = dim(r);
         return std::pair{std::vector{random_parameter(r, "a", {m, n}), random_parameter(r, "b", {m, n})},
                          Build([](Tape&, const std::vector<Var>& in) { return add(in[0], in[1]); })};
       }},
      {"mul",
       [](std::mt19937_64& r) {
         const std::size_t m = dim(r), n = dim(r);
         return std::pair{std::vector{random_parameter(r, "a", {m, n}), random_parameter(r, "b", {m, n})},
                          Build([](Tape&, const std::vector<Var>& in) { return mul(in[0], in[1]); })};
       }},
      {"add_bias",
       [](std::mt19937_64& r) {
         const std::size_t m = dim(r), n = dim(r);
         return std::pair{std::vector{random_parameter(r, "x", {m, n}), random_parameter(r, "b", {1, n})},
                          Build([](Tape&, const std::vector<Var>& in) { return add_bias(in[0], in[1]); })};
       }},
      {"scale_rows",
       [](std::mt19937_64& r) {
         const std::size_t m = dim(r), n = dim(r);
         return std::pair{std::vector{random_parameter(r, "x", {m, n}), random_parameter(r, "s", {m, 1})},
                          Build([](Tape&, const std::vector<Var>& in) { return scale_rows(in[0], in[1]); })};
       }},
      {"sigmoid",
       [](std::mt19937_64& r) {
         return std::pair{std::vector{random_parameter(r, "x", {dim(r), dim(r)})},
                          Build([](Tape&, const std::vector<Var>& in) { return sigmoid(in[0]); })};
       }},
      {"relu",
       [](std::mt19937_64& r) {
         return std::pair{std::vector{random_parameter(r, "x", {dim(r), dim(r)})},
                          Build([](Tape&, const std::vector<Var>& in) { return relu(in[0]); })};
       }},
      {"sum",
       [](std::mt19937_64& r) {
         return std::pair{std::vector{random_parameter(r, "x", {dim(r), dim(r)})},
                          Build([](Tape&, const std::vector<Var>& in) { return sum(in[0]); })};
       }},
      {"mean",
       [](std::mt19937_64& r) {
         return std::pair{std::vector{random_parameter(r, "x", {dim(r), dim(r)})},
                          Build([](Tape&, const std::vector<Var>& in) { return mean(in[0]); })};
       }},
      {"concat_cols",
       [](std::mt19937_64& r) {
         const std::size_t m = dim(r);
         return std::pair{std::vector{random_parameter(r, "a", {m, dim(r)}), random_parameter(r, "b", {m, dim(r)})},
                          Build([](Tape&, const std::vector<Var>& in) { return concat_cols(in); })};
       }},
      {"concat_rows",
       [](std::mt19937_64& r) {
         const std::size_t n = dim(r);
         return std::pair{std::vector{random_parameter(r, "a", {dim(r), n}), random_parameter(r, "b", {dim(r), n})},
                          Build([](Tape&, const std::vector<Var>& in) { return concat_rows(in); })};
       }},
      {"repeat_rows",
       [](std::mt19937_64& r) {
         const std::size_t times = dim(r);
         return std::pair{std::vector{random_parameter(r, "x", {dim(r), dim(r)})},
                          Build([times](Tape&, const std::vector<Var>& in) { return repeat_rows(in[0], times); })};
       }},
      {"segment_mean",
       [](std::mt19937_64& r) {
         const std::size_t group = dim(r);
         return std::pair{std::vector{random_parameter(r, "x", {group * dim(r), dim(r)})},
                          Build([group](Tape&, const std::vector<Var>& in) { return segment_mean(in[0], group); })};
       }},
      {"global_average_pool",
       [](std::mt19937_64& r) {
         return std::pair{std::vector{random_parameter(r, "v", {dim(r), dim(r), dim(r), dim(r)})},
                          Build([](Tape&, const std::vector<Var>& in) { return global_average_pool(in[0]); })};
       }},
      {"depthwise_temporal_conv1d",
       [](std::mt19937_64& r) {
         const std::size_t k = dim(r);
         const std::size_t w = 2 * dim(r, 0, 2) + 1;
         return std::pair{std::vector{random_parameter(r, "a", {dim(r, 1, 8), k}), random_parameter(r, "kernel", {k, w})},
                          Build([](Tape&, const std::vector<Var>& in) {
                            return depthwise_temporal_conv1d(in[0], in[1]);
                          })};
       }},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      auto [inputs, build] = c.make(rng);
      worst = std::max(worst, weighted_error(inputs, build, rng));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("finite-difference check of a linear function") {
  std::mt19937_64 rng(1);
  auto a = random_parameter(rng, "a", {3, 2});
  auto b = random_parameter(rng, "b", {4});
  std::vector<Parameter*> ptrs{&a, &b};
  const auto report = finite_difference_report(
      [&](Tape& t) { return add(sum(t.bind(a)), sum(t.bind(b))); }, ptrs);
  CHECK(report.max_relative_error < 1e-10);
  CHECK(report.entries == 10);
  for (double g : a.tensor.grad) CHECK(g == 1.0);
}

TEST_CASE("finite-difference check catches a corrupted gradient") {
  std::mt19937_64 rng(9);
  auto x = random_parameter(rng, "x", {2, 3});
  std::vector<Parameter*> ptrs{&x};
  const ScalarFn f = [&](Tape& t) {
    const auto v = t.bind(x);
    return sum(mul(v, sigmoid(v)));
  };
  CHECK(finite_difference_check(f, ptrs) < 1e-5);
  const auto report = finite_difference_report(f, ptrs, 1e-5, [](std::span<Parameter* const> ps) {
    ps[0]->tensor.grad[2] *= 1.1;
  });
  CHECK(report.max_relative_error > 0.04);
  CHECK(report.worst_parameter == "x");
  CHECK(report.worst_index == 2);
}

TEST_CASE("finite-difference check rejects non-finite values") {
  Parameter x{"x", Tensor({1}, {1.0}, true)};
  std::vector<Parameter*> ptrs{&x};
  const ScalarFn f = [&](Tape& t) {
    const auto v = t.bind(x);
    return mul(v, t.constant({1}, {std::numeric_limits<double>::infinity()}));
  };
  CHECK_THROWS_AS((void)finite_difference_check(f, ptrs), EvaluationError);
  CHECK_THROWS_AS((void)finite_difference_check([&](Tape& t) { return sum(t.bind(x)); }, ptrs, 0.0), ConfigError);
}

TEST_CASE("forward passes are deterministic") {
  std::mt19937_64 rng(4);
  auto a = random_parameter(rng, "a", {8, 5});
  auto k = random_parameter(rng, "k", {5, 3});
  auto w = random_parameter(rng, "w", {5, 4});
  const auto run = [&] {
    Tape tape(false);
    return values_of(sigmoid(matmul(depthwise_temporal_conv1d(tape.bind(a), tape.bind(k)), tape.bind(w))));
  };
  CHECK(run() == run());
}

TEST_CASE("adam first step moves by the learning rate") {
  Parameter p{"w", Tensor({1}, {1.0}, true)};
  p.tensor.grad = {1.0};
  AdamHyper hyper;
  hyper.learning_rate = 0.1;
  std::vector<AdamState> states{AdamState::for_parameter(p.tensor, hyper)};
  std::vector<Parameter*> ptrs{&p};
  adam_step(ptrs, states);
  CHECK(p.tensor.values[0] == doctest::Approx(0.9).epsilon(1e-7));
  CHECK(p.tensor.values[0] < 1.0);
  CHECK(states[0].step_count == 1);
}

TEST_CASE("adam leaves a zero-gradient parameter unchanged") {
  Parameter p{"w", Tensor({3}, {0.5, -1.25, 2.0}, true)};
  p.tensor.grad = {0.0, 0.0, 0.0};
  AdamHyper hyper;
  hyper.learning_rate = 0.1;
  std::vector<AdamState> states{AdamState::for_parameter(p.tensor, hyper)};
  std::vector<Parameter*> ptrs{&p};
  for (int i = 0; i < 5; ++i) adam_step(ptrs, states);
  CHECK(p.tensor.values == std::vector<double>{0.5, -1.25, 2.0});
}

TEST_CASE("adam minimizes a scalar quadratic") {
  Parameter p{"w", Tensor({1}, {0.0}, true)};
  AdamHyper hyper;
  hyper.learning_rate = 0.1;
  std::vector<AdamState> states{AdamState::for_parameter(p.tensor, hyper)};
  std::vector<Parameter*> ptrs{&p};
  std::vector<double> distance;
  for (int step = 0; step < 50; ++step) {
    p.tensor.grad = {2.0 * (p.tensor.values[0] - 3.0)};
    adam_step(ptrs, states);
    distance.push_back(std::abs(p.tensor.values[0] - 3.0));
  }
  // Approach phase: the iterate has not yet reached the minimum.
  for (std::size_t i = 1; i < 20; ++i) CHECK(distance[i] < distance[i - 1]);
  CHECK(distance.back() < 0.5);
}

TEST_CASE("adam reports the parameter without a gradient") {
  Parameter p{"fusion.w1", Tensor({2}, {1.0, 2.0}, true)};
  p.tensor.grad.clear();
  std::vector<AdamState> states{AdamState::for_parameter(p.tensor, AdamHyper{})};
  std::vector<Parameter*> ptrs{&p};
  try {
    adam_step(ptrs, states);
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("fusion.w1") != std::string::npos);
  }
}

TEST_CASE("adam weight decay shrinks towards zero") {
  Parameter p{"w", Tensor({1}, {2.0}, true)};
  p.tensor.grad = {0.0};
  AdamHyper hyper;
  hyper.learning_rate = 0.1;
  hyper.weight_decay = 0.5;
  std::vector<AdamState> states{AdamState::for_parameter(p.tensor, hyper)};
  std::vector<Parameter*> ptrs{&p};
  adam_step(ptrs, states);
  CHECK(p.tensor.values[0] == doctest::Approx(2.0 - 0.1 * 0.5 * 2.0));
}

}  // TEST_SUITE
