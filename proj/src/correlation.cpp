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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avqa/error.hpp"
#include "avqa/metrics.hpp"

namespace avqa::metrics {
namespace {

void check_pair(const char* op, std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(op) + ": lengths " + std::to_string(x.size()) + " and " + std::to_string(y.size()));
  }
  if (x.size() < 3) throw PreconditionError(std::string(op) + ": needs at least 3 samples");
}

// Sum of squared deviations that is indistinguishable from rounding noise.
bool is_constant(std::span<const double> v, double ss) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  const double tol = 1e-13 * scale;
  return ss <= static_cast<double>(v.size()) * tol * tol;
}

}  // namespace

double plcc(std::span<const double> x, std::span<const double> y) {
  check_pair("plcc", x, y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (is_constant(x, sxx) || is_constant(y, syy)) throw ZeroVarianceError("plcc: zero variance input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> fractional_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    // positions i..j (0-based) share rank mean((i+1)..(j+1))
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double srocc(std::span<const double> x, std::span<const double> y) {
  check_pair("srocc", x, y);
  const std::vector<double> rx = fractional_ranks(x);
  const std::vector<double> ry = fractional_ranks(y);
  return plcc(rx, ry);
}

}  // namespace avqa::metrics
