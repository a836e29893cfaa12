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
#include <limits>
#include <numeric>

#include "avqa/error.hpp"
#include "avqa/metrics.hpp"

namespace avqa::metrics {
namespace {

// p-values are reported in (0, 1].
double clamp_p(double p) { return std::clamp(p, std::numeric_limits<double>::min(), 1.0); }

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

struct RankedDiffs {
  std::vector<double> ranks;  // mid-ranks of |d|
  std::vector<bool> positive;
  double tie_term = 0.0;      // sum over tie groups of (t^3 - t)
};

RankedDiffs rank_nonzero(std::span<const double> d) {
  std::vector<double> mag;
  RankedDiffs out;
  for (double x : d) {
    if (x == 0.0) continue;
    mag.push_back(std::abs(x));
    out.positive.push_back(x > 0.0);
  }
  out.ranks = fractional_ranks(mag);
  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

double w_plus_of(const RankedDiffs& r) {
  double w = 0.0;
  for (std::size_t i = 0; i < r.ranks.size(); ++i)
    if (r.positive[i]) w += r.ranks[i];
  return w;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw PreconditionError("incomplete_beta: a and b must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double dof) {
  if (!(dof > 0.0)) throw PreconditionError("student_t_two_sided_p: dof must be positive");
  if (std::isnan(t)) throw EvaluationError("student_t_two_sided_p: t is NaN");
  if (std::isinf(t)) return 0.0;
  return incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("paired_t_test: sample lengths differ");
  if (a.size() < 2) throw PreconditionError("paired_t_test: needs at least 2 pairs");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0.0; })) {
    throw DegenerateInputError("paired_t_test: all differences are zero");
  }
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / nd;
  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double se = std::sqrt(ss / (nd - 1.0) / nd);
  TTestResult r;
  r.dof = nd - 1.0;
  if (se == 0.0) {
    r.t = mean > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
  } else {
    r.t = mean / se;
  }
  r.p_two_sided = clamp_p(student_t_two_sided_p(r.t, r.dof));
  return r;
}

WilcoxonResult wilcoxon_exact(std::span<const double> d) {
  const RankedDiffs r = rank_nonzero(d);
  const std::size_t n = r.ranks.size();
  if (n == 0) throw DegenerateInputError("wilcoxon: all differences are zero");
  if (n > 62) throw PreconditionError("wilcoxon_exact: too many differences for exact enumeration");

  // Mid-ranks are multiples of 1/2, so twice the rank sum is an integer.
  std::vector<std::size_t> doubled(n);
  std::size_t total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled[i] = static_cast<std::size_t>(std::llround(2.0 * r.ranks[i]));
    total += doubled[i];
  }
  // counts[s] = number of sign assignments whose doubled W+ equals s.
  std::vector<double> counts(total + 1, 0.0);
  counts[0] = 1.0;
  std::size_t reach = 0;
  for (std::size_t w : doubled) {
    for (std::size_t s = reach + 1; s-- > 0;)
      if (counts[s] != 0.0) counts[s + w] += counts[s];
    reach += w;
  }
  const double all = std::ldexp(1.0, static_cast<int>(n));
  WilcoxonResult out;
  out.exact = true;
  out.n_used = n;
  out.w_plus = w_plus_of(r);
  const auto observed = static_cast<std::size_t>(std::llround(2.0 * out.w_plus));
  double lower = 0.0, upper = 0.0;
  for (std::size_t s = 0; s <= total; ++s) {
    if (s <= observed) lower += counts[s];
    if (s >= observed) upper += counts[s];
  }
  lower /= all;
  upper /= all;
  out.p_less = clamp_p(lower);
  out.p_two_sided = clamp_p(2.0 * std::min(lower, upper));
  return out;
}

WilcoxonResult wilcoxon_normal(std::span<const double> d) {
  const RankedDiffs r = rank_nonzero(d);
  const std::size_t n = r.ranks.size();
  if (n == 0) throw DegenerateInputError("wilcoxon: all differences are zero");
  const double nd = static_cast<double>(n);
  const double mu = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - r.tie_term / 48.0;
  WilcoxonResult out;
  out.n_used = n;
  out.w_plus = w_plus_of(r);
  if (!(var > 0.0)) throw DegenerateInputError("wilcoxon: null variance is zero");
  const double sd = std::sqrt(var);
  const double lower = normal_cdf((out.w_plus - mu + 0.5) / sd);
  const double upper = 1.0 - normal_cdf((out.w_plus - mu - 0.5) / sd);
  out.p_less = clamp_p(lower);
  out.p_two_sided = clamp_p(2.0 * std::min(lower, upper));
  return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> d) {
  const auto nonzero = static_cast<std::size_t>(std::count_if(d.begin(), d.end(), [](double x) { return x != 0.0; }));
  return nonzero <= kWilcoxonExactMaxN ? wilcoxon_exact(d) : wilcoxon_normal(d);
}

SignificanceReport paired_tests(std::span<const double> err_a, std::span<const double> err_b, double alpha) {
  if (err_a.size() != err_b.size()) {
    throw DimensionError("paired_tests: " + std::to_string(err_a.size()) + " vs " + std::to_string(err_b.size()) +
                         " errors");
  }
  if (err_a.size() < 6) throw PreconditionError("paired_tests: needs at least 6 pairs");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("paired_tests: alpha must lie in (0, 1)");
  const std::size_t n = err_a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = err_a[i] - err_b[i];

  SignificanceReport rep;
  rep.n = n;
  rep.alpha = alpha;
  const double nd = static_cast<double>(n);
  rep.mean_abs_err_diff = std::accumulate(err_a.begin(), err_a.end(), 0.0) / nd -
                          std::accumulate(err_b.begin(), err_b.end(), 0.0) / nd;
  const TTestResult t = paired_t_test(err_a, err_b);
  rep.t_statistic = t.t;
  rep.t_p_two_sided = t.p_two_sided;
  const WilcoxonResult w = wilcoxon_signed_rank(d);
  rep.wilcoxon_w_plus = w.w_plus;
  rep.wilcoxon_p_two_sided = w.p_two_sided;
  rep.wilcoxon_p_one_sided = w.p_less;
  rep.wilcoxon_exact = w.exact;
  return rep;
}

}  // namespace avqa::metrics
