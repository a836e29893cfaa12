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
#include <span>
#include <vector>

namespace avqa::metrics {

// Sample Pearson correlation. Needs equal lengths >= 3 and non-constant inputs
// (ZeroVarianceError otherwise).
double plcc(std::span<const double> x, std::span<const double> y);

// 1-based fractional ranks; tied values share the mean of their positions.
std::vector<double> fractional_ranks(std::span<const double> x);

// Pearson correlation of fractional ranks. Equal lengths >= 3; all-tied input
// throws ZeroVarianceError.
double srocc(std::span<const double> x, std::span<const double> y);

// q(s) = b2 + (b1 - b2) / (1 + exp(-(s - b3) / |b4|))
struct Logistic4 {
  std::array<double, 4> beta{1.0, 0.0, 0.0, 1.0};

  double operator()(double s) const;
  std::vector<double> map(std::span<const double> s) const;
};

struct LogisticFit {
  Logistic4 curve;
  double sse = 0.0;
  std::vector<double> sse_trace;  // loss after the initial guess and each accepted step
  std::size_t iterations = 0;
  bool converged = false;
};

// Levenberg-Marquardt least squares fit of the four-parameter logistic, started
// from b1 = max(mos), b2 = min(mos), b3 = median(pred), b4 = std(pred). Stops
// when an accepted step changes the loss by less than 1e-10 relative, or after
// 500 iterations (converged == false, best iterate returned).
LogisticFit fit_logistic4(std::span<const double> pred, std::span<const double> mos);

struct EvalReport {
  double plcc_raw = 0.0;
  double plcc_fitted = 0.0;
  double srocc = 0.0;
  std::array<double, 4> logistic_params{};
  std::size_t n = 0;
  bool fit_converged = false;
};

EvalReport evaluate(std::span<const double> pred, std::span<const double> mos);

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value of Student's t with `dof` degrees of freedom.
double student_t_two_sided_p(double t, double dof);

struct TTestResult {
  double t = 0.0;
  double dof = 0.0;
  double p_two_sided = 1.0;
};

// Paired t-test on a - b. Needs n >= 2; DegenerateInputError if every
// difference is zero.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

struct WilcoxonResult {
  double w_plus = 0.0;        // sum of ranks of positive differences
  std::size_t n_used = 0;     // non-zero differences
  double p_two_sided = 1.0;
  double p_less = 1.0;        // H1: differences tend to be negative
  bool exact = false;
};

// Signed-rank test on the differences d (zeros dropped, ties mid-ranked).
// The exact variant enumerates the null distribution of W+ over all 2^n sign
// assignments of the observed ranks; the normal variant uses the tie-corrected
// variance and a 0.5 continuity correction.
WilcoxonResult wilcoxon_exact(std::span<const double> d);
WilcoxonResult wilcoxon_normal(std::span<const double> d);
// Exact for n <= 25 non-zero differences, normal approximation above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> d);

inline constexpr std::size_t kWilcoxonExactMaxN = 25;

struct SignificanceReport {
  std::size_t n = 0;
  double mean_abs_err_diff = 0.0;  // mean(err_a) - mean(err_b)
  double t_statistic = 0.0;
  double t_p_two_sided = 1.0;
  double wilcoxon_w_plus = 0.0;
  double wilcoxon_p_two_sided = 1.0;
  double wilcoxon_p_one_sided = 1.0;  // H1: err_a tends to be smaller than err_b
  bool wilcoxon_exact = false;
  double alpha = 0.05;
};

// Paired t-test and Wilcoxon signed-rank test on per-sample absolute errors.
// Equal lengths >= 6; DegenerateInputError if all differences are zero.
SignificanceReport paired_tests(std::span<const double> err_a, std::span<const double> err_b, double alpha = 0.05);

}  // namespace avqa::metrics
