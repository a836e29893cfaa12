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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "avqa/error.hpp"
#include "avqa/metrics.hpp"
#include "avqa/ops.hpp"

namespace avqa::metrics {
namespace {

constexpr std::size_t kMaxIterations = 500;
constexpr double kRelTol = 1e-10;
constexpr double kMaxDamping = 1e20;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double stddev(std::span<const double> v) {
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / (n - 1.0));
}

double sse(const Logistic4& f, std::span<const double> s, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double r = f(s[i]) - y[i];
    acc += r * r;
  }
  return acc;
}

}  // namespace

double Logistic4::operator()(double s) const {
  const double scale = std::abs(beta[3]);
  return beta[1] + (beta[0] - beta[1]) * numerics::sigmoid((s - beta[2]) / scale);
}

std::vector<double> Logistic4::map(std::span<const double> s) const {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = (*this)(s[i]);
  return out;
}

namespace {

LogisticFit refine(const Logistic4& start, std::span<const double> pred, std::span<const double> mos) {
  LogisticFit fit;
  fit.curve = start;
  fit.sse = sse(fit.curve, pred, mos);
  if (!std::isfinite(fit.sse)) throw FitError("fit_logistic4: non-finite residuals at the initial guess");
  fit.sse_trace.push_back(fit.sse);

  const std::size_t n = pred.size();
  Eigen::MatrixXd jac(n, 4);
  Eigen::VectorXd res(n);
  double damping = 1e-3;

  while (fit.iterations < kMaxIterations) {
    ++fit.iterations;
    const auto& b = fit.curve.beta;
    const double scale = std::abs(b[3]);
    const double sign = b[3] < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (pred[i] - b[2]) / scale;
      const double l = numerics::sigmoid(u);
      const double dl = l * (1.0 - l);
      jac(i, 0) = l;
      jac(i, 1) = 1.0 - l;
      jac(i, 2) = -(b[0] - b[1]) * dl / scale;
      jac(i, 3) = -(b[0] - b[1]) * dl * u / scale * sign;
      res(i) = b[1] + (b[0] - b[1]) * l - mos[i];
    }
    const Eigen::Matrix4d jtj = jac.transpose() * jac;
    const Eigen::Vector4d jtr = jac.transpose() * res;

    // Increase damping until a step lowers the loss.
    bool accepted = false;
    while (damping <= kMaxDamping) {
      Eigen::Matrix4d lhs = jtj;
      for (int k = 0; k < 4; ++k) lhs(k, k) += damping * std::max(jtj(k, k), 1e-12);
      const Eigen::Vector4d step = lhs.ldlt().solve(-jtr);
      Logistic4 trial = fit.curve;
      for (int k = 0; k < 4; ++k) trial.beta[k] += step(k);
      const double trial_sse = (trial.beta[3] != 0.0 && step.allFinite()) ? sse(trial, pred, mos)
                                                                          : std::numeric_limits<double>::infinity();
      if (std::isfinite(trial_sse) && trial_sse < fit.sse) {
        const double rel = (fit.sse - trial_sse) / std::max(fit.sse, std::numeric_limits<double>::min());
        fit.curve = trial;
        fit.sse = trial_sse;
        fit.sse_trace.push_back(trial_sse);
        damping = std::max(damping / 10.0, 1e-12);
        accepted = true;
        if (rel < kRelTol || fit.sse == 0.0) {
          fit.converged = true;
          return fit;
        }
        break;
      }
      damping *= 10.0;
    }
    if (!accepted) {
      // No descent direction left: the current iterate is a local minimum.
      fit.converged = true;
      return fit;
    }
  }
  return fit;
}

}  // namespace

LogisticFit fit_logistic4(std::span<const double> pred, std::span<const double> mos) {
  if (pred.size() != mos.size()) throw DimensionError("fit_logistic4: prediction and MOS lengths differ");
  if (pred.size() < 5) throw PreconditionError("fit_logistic4: needs at least 5 samples");
  const auto [lo, hi] = std::minmax_element(mos.begin(), mos.end());
  if (*lo == *hi) throw ZeroVarianceError("fit_logistic4: MOS is constant");

  double spread = stddev(pred);
  if (!(spread > 0.0)) spread = 1.0;
  const double centre = median({pred.begin(), pred.end()});
  LogisticFit best = refine(Logistic4{{*hi, *lo, centre, spread}}, pred, mos);

  // Second start: the least-squares line, embedded in the near-linear part of
  // a wide sigmoid (slope at the centre is (b0 - b1) / (4 b3)).
  const double n = static_cast<double>(pred.size());
  const double mp = std::accumulate(pred.begin(), pred.end(), 0.0) / n;
  const double mm = std::accumulate(mos.begin(), mos.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    sxy += (pred[i] - mp) * (mos[i] - mm);
    sxx += (pred[i] - mp) * (pred[i] - mp);
  }
  if (sxx > 0.0) {
    const double wide = 10.0 * spread;
    const double amplitude = 4.0 * wide * sxy / sxx;
    LogisticFit linear = refine(Logistic4{{mm + amplitude / 2.0, mm - amplitude / 2.0, mp, wide}}, pred, mos);
    if (linear.sse < best.sse) best = std::move(linear);
  }
  return best;
}

EvalReport evaluate(std::span<const double> pred, std::span<const double> mos) {
  const LogisticFit fit = fit_logistic4(pred, mos);
  EvalReport r;
  r.n = pred.size();
  r.plcc_raw = plcc(pred, mos);
  r.plcc_fitted = plcc(fit.curve.map(pred), mos);
  r.srocc = srocc(pred, mos);
  r.logistic_params = fit.curve.beta;
  r.fit_converged = fit.converged;
  return r;
}

}  // namespace avqa::metrics
