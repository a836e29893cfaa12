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

#include "avqa/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "avqa/error.hpp"
#include "avqa/ops.hpp"

namespace avqa::model {

using numerics::shape_string;

// ---------------------------------------------------------------------------
// ModelConfig

void ModelConfig::validate() const {
  if (channels == 0 || height == 0 || width == 0 || audio_dim == 0 || frames == 0 || artifact_types == 0 ||
      fusion_hidden == 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (!(lambda_pcc >= 0.0)) throw ConfigError("lambda_pcc must be >= 0");
  confidence::VisualConfidenceConfig{artifact_types, vcm_heads, vcm_head_hidden, vcm_combiner_hidden, vcm_kernel_width}
      .validate();
}

std::string ModelConfig::to_text() const {
  char lambda[40];
  std::snprintf(lambda, sizeof lambda, "%.17g", lambda_pcc);
  std::ostringstream os;
  os << "channels=" << channels << '\n'
     << "height=" << height << '\n'
     << "width=" << width << '\n'
     << "audio_dim=" << audio_dim << '\n'
     << "frames=" << frames << '\n'
     << "artifact_types=" << artifact_types << '\n'
     << "use_avm=" << (use_avm ? 1 : 0) << '\n'
     << "use_vcm=" << (use_vcm ? 1 : 0) << '\n'
     << "use_acm=" << (use_acm ? 1 : 0) << '\n'
     << "lambda_pcc=" << lambda << '\n'
     << "fusion_hidden=" << fusion_hidden << '\n'
     << "seed=" << seed << '\n'
     << "vcm_heads=" << vcm_heads << '\n'
     << "vcm_head_hidden=" << vcm_head_hidden << '\n'
     << "vcm_combiner_hidden=" << vcm_combiner_hidden << '\n'
     << "vcm_kernel_width=" << vcm_kernel_width << '\n';
  return os.str();
}

ModelConfig ModelConfig::parse(const std::string& text) {
  ModelConfig cfg;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("model config line without '=': " + line);
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    auto as_size = [&] { return static_cast<std::size_t>(std::stoull(value)); };
    if (key == "channels") cfg.channels = as_size();
    else if (key == "height") cfg.height = as_size();
    else if (key == "width") cfg.width = as_size();
    else if (key == "audio_dim") cfg.audio_dim = as_size();
    else if (key == "frames") cfg.frames = as_size();
    else if (key == "artifact_types") cfg.artifact_types = as_size();
    else if (key == "use_avm") cfg.use_avm = value == "1";
    else if (key == "use_vcm") cfg.use_vcm = value == "1";
    else if (key == "use_acm") cfg.use_acm = value == "1";
    else if (key == "lambda_pcc") cfg.lambda_pcc = std::stod(value);
    else if (key == "fusion_hidden") cfg.fusion_hidden = as_size();
    else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "vcm_heads") cfg.vcm_heads = as_size();
    else if (key == "vcm_head_hidden") cfg.vcm_head_hidden = as_size();
    else if (key == "vcm_combiner_hidden") cfg.vcm_combiner_hidden = as_size();
    else if (key == "vcm_kernel_width") cfg.vcm_kernel_width = as_size();
    else throw ConfigError("unknown model config key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

std::string ModelConfig::toggle_label() const {
  std::string s;
  s += use_avm ? '+' : '-';
  s += ',';
  s += use_vcm ? '+' : '-';
  s += ',';
  s += use_acm ? '+' : '-';
  return s;
}

// ---------------------------------------------------------------------------
// AvqaModel

AvqaModel::AvqaModel(const ModelConfig& cfg)
    : cfg_(cfg),
      vcm_((cfg.validate(),
            confidence::VisualConfidenceConfig{cfg.artifact_types, cfg.vcm_heads, cfg.vcm_head_hidden,
                                               cfg.vcm_combiner_hidden, cfg.vcm_kernel_width}),
           numerics::mix_seed(cfg.seed, 10)),
      mixer_(mixer::MixerParams::init(cfg.audio_dim, cfg.channels, numerics::mix_seed(cfg.seed, 20))) {
  const std::size_t in = cfg_.channels + cfg_.audio_dim + 2;
  const std::size_t hidden = cfg_.fusion_hidden;
  const std::uint64_t s = numerics::mix_seed(cfg_.seed, 30);
  fusion_w1_ = {"fusion.w1", numerics::uniform_fan_in({in, hidden}, in, numerics::mix_seed(s, 1))};
  fusion_b1_ = {"fusion.b1", numerics::uniform_fan_in({hidden}, in, numerics::mix_seed(s, 2))};
  head_w2_ = {"head.w2", numerics::uniform_fan_in({hidden, 1}, hidden, numerics::mix_seed(s, 3))};
  head_b2_ = {"head.b2", numerics::uniform_fan_in({1}, hidden, numerics::mix_seed(s, 4))};
}

void AvqaModel::check_batch(std::span<const ClipSample> batch) const {
  if (batch.empty()) throw PreconditionError("forward: empty batch");
  const numerics::Shape visual{cfg_.frames, cfg_.channels, cfg_.height, cfg_.width};
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const ClipSample& s = batch[i];
    auto fail = [&](const std::string& what) {
      throw DimensionError("sample " + std::to_string(i) + ": " + what);
    };
    if (s.visual.shape != visual || s.visual.values.size() != numerics::shape_size(visual)) {
      fail("visual features " + shape_string(s.visual.shape) + ", expected " + shape_string(visual));
    }
    if (s.audio.size() != cfg_.audio_dim) {
      fail("audio embedding has " + std::to_string(s.audio.size()) + " entries, expected " +
           std::to_string(cfg_.audio_dim));
    }
    if (cfg_.use_vcm && (s.artifacts.frames != cfg_.frames || s.artifacts.types != cfg_.artifact_types ||
                         s.artifacts.probs.size() != cfg_.frames * cfg_.artifact_types)) {
      fail("artifact matrix " + std::to_string(s.artifacts.frames) + "x" + std::to_string(s.artifacts.types) +
           ", expected " + std::to_string(cfg_.frames) + "x" + std::to_string(cfg_.artifact_types));
    }
  }
}

ForwardOutput AvqaModel::forward(Tape& tape, std::span<const ClipSample> batch) {
  using namespace numerics;
  check_batch(batch);
  const std::size_t b = batch.size();
  const std::size_t t = cfg_.frames;
  const std::size_t c = cfg_.channels;
  const std::size_t d = cfg_.audio_dim;

  std::vector<double> visual;
  visual.reserve(b * t * c * cfg_.height * cfg_.width);
  std::vector<double> audio;
  audio.reserve(b * d);
  for (const ClipSample& s : batch) {
    visual.insert(visual.end(), s.visual.values.begin(), s.visual.values.end());
    audio.insert(audio.end(), s.audio.begin(), s.audio.end());
  }
  const Var v = tape.constant({b * t, c, cfg_.height, cfg_.width}, std::move(visual));
  const Var a = tape.constant({b, d}, std::move(audio));

  ForwardOutput out;

  if (cfg_.use_vcm) {
    const confidence::VisualConfidenceVars net = vcm_.bind(tape);
    std::vector<Var> smoothed;
    smoothed.reserve(b);
    for (const ClipSample& s : batch) smoothed.push_back(confidence::smooth_artifacts(tape, s.artifacts, net.kernel));
    out.frame_scores = confidence::frame_confidence(net, concat_rows(smoothed));
    out.r_v = segment_mean(out.frame_scores, t);
  } else {
    out.r_v = tape.constant({b, 1}, std::vector<double>(b, 1.0));
  }

  if (cfg_.use_acm) {
    std::vector<double> r_a(b);
    for (std::size_t i = 0; i < b; ++i) r_a[i] = confidence::audio_confidence(batch[i].audio_cue);
    out.r_a = tape.constant({b, 1}, std::move(r_a));
  } else {
    out.r_a = tape.constant({b, 1}, std::vector<double>(b, 1.0));
  }

  Var clip_visual;
  if (cfg_.use_avm) {
    const mixer::MixerVars mv = mixer::MixerVars::bind(tape, mixer_);
    const mixer::MixerOutput m = mixer::mix(v, a, out.r_a, repeat_rows(out.r_v, t), mv, t);
    out.alpha = m.alpha;
    clip_visual = segment_mean(global_average_pool(m.v_enhanced), t);
  } else {
    clip_visual = segment_mean(global_average_pool(v), t);
  }

  const Var parts[] = {scale_rows(clip_visual, out.r_v), scale_rows(a, out.r_a), out.r_v, out.r_a};
  const Var fused = concat_cols(parts);
  const Var hidden = relu(add_bias(matmul(fused, tape.bind(fusion_w1_)), tape.bind(fusion_b1_)));
  out.score = sigmoid(add_bias(matmul(hidden, tape.bind(head_w2_)), tape.bind(head_b2_)));
  return out;
}

std::vector<Prediction> AvqaModel::predict(std::span<const ClipSample> batch) {
  Tape tape(false);
  const ForwardOutput f = forward(tape, batch);
  const std::size_t t = cfg_.frames;
  const std::size_t c = cfg_.channels;
  std::vector<Prediction> out(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Prediction& p = out[i];
    p.score = f.score.value()[i];
    p.confidences.r_v = f.r_v.value()[i];
    p.confidences.r_a = f.r_a.value()[i];
    if (f.frame_scores.valid()) {
      const auto fs = f.frame_scores.value();
      p.confidences.frame_scores.assign(fs.begin() + i * t, fs.begin() + (i + 1) * t);
    }
    if (f.alpha.valid()) {
      const auto al = f.alpha.value();
      p.alpha_mean.assign(c, 0.0);
      for (std::size_t k = 0; k < t; ++k)
        for (std::size_t j = 0; j < c; ++j) p.alpha_mean[j] += al[(i * t + k) * c + j];
      for (double& x : p.alpha_mean) x /= static_cast<double>(t);
    }
  }
  return out;
}

std::vector<double> AvqaModel::predict_scores(std::span<const ClipSample> samples, std::size_t chunk) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
    const std::size_t n = std::min(chunk, samples.size() - begin);
    Tape tape(false);
    const ForwardOutput f = forward(tape, samples.subspan(begin, n));
    const auto s = f.score.value();
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

std::vector<Parameter*> AvqaModel::parameters() {
  std::vector<Parameter*> out = vcm_.parameters();
  for (Parameter* p : mixer_.parameters()) out.push_back(p);
  out.insert(out.end(), {&fusion_w1_, &fusion_b1_, &head_w2_, &head_b2_});
  return out;
}

std::vector<Parameter*> AvqaModel::trainable_parameters() {
  std::vector<Parameter*> out;
  for (const ParameterGroup& g : parameter_groups()) out.insert(out.end(), g.params.begin(), g.params.end());
  return out;
}

std::vector<ParameterGroup> AvqaModel::parameter_groups() {
  std::vector<ParameterGroup> out;
  if (cfg_.use_avm) {
    out.push_back({"mixer.w_a", {&mixer_.w_a}});
    out.push_back({"mixer.w_v", {&mixer_.w_v}});
    out.push_back({"mixer.w_g", {&mixer_.w_g}});
  }
  if (cfg_.use_vcm) {
    out.push_back({"vcm.kernel", vcm_.kernel_parameters()});
    out.push_back({"vcm.heads", vcm_.head_parameters()});
    out.push_back({"vcm.combiner", vcm_.combiner_parameters()});
  }
  out.push_back({"fusion", {&fusion_w1_, &fusion_b1_}});
  out.push_back({"regression", {&head_w2_, &head_b2_}});
  return out;
}

// ---------------------------------------------------------------------------
// Losses

namespace {

// Variance below this (per sample) counts as constant.
constexpr double kMinVariance = 1e-20;

struct Pearson {
  double rho;
  double sxx;
  double syy;
  double mean_x;
  double mean_y;
};

Pearson pearson(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  const double nd = static_cast<double>(n);
  if (sxx / nd < kMinVariance) throw ZeroVarianceError("pcc_loss: predictions have zero variance");
  if (syy / nd < kMinVariance) throw ZeroVarianceError("pcc_loss: targets have zero variance");
  const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  return {rho, sxx, syy, mx, my};
}

void check_lengths(const char* op, std::size_t pred, std::size_t target, std::size_t min_n) {
  if (pred != target) {
    throw DimensionError(std::string(op) + ": " + std::to_string(pred) + " predictions vs " + std::to_string(target) +
                         " targets");
  }
  if (pred < min_n) throw PreconditionError(std::string(op) + ": needs at least " + std::to_string(min_n) + " entries");
}

}  // namespace

Var pcc_loss(const Var& pred, std::span<const double> target) {
  check_lengths("pcc_loss", pred.size(), target.size(), 2);
  const Pearson p = pearson(pred.value(), target);
  std::vector<double> tgt(target.begin(), target.end());
  const std::size_t ip = pred.id();
  return pred.tape().record({1}, {1.0 - p.rho}, {pred}, [ip, p, tgt = std::move(tgt)](numerics::Tape& t, std::size_t self) {
    const double g = t.out_grad(self)[0];
    auto gp = t.in_grad(ip);
    if (gp.empty()) return;
    const auto& x = t.value(ip);
    const double norm = std::sqrt(p.sxx * p.syy);
    // d rho / d x_i = (y_i - my) / sqrt(sxx syy) - rho (x_i - mx) / sxx
    for (std::size_t i = 0; i < gp.size(); ++i) {
      const double drho = (tgt[i] - p.mean_y) / norm - p.rho * (x[i] - p.mean_x) / p.sxx;
      gp[i] -= g * drho;
    }
  });
}

double pcc_loss(std::span<const double> pred, std::span<const double> target) {
  check_lengths("pcc_loss", pred.size(), target.size(), 2);
  return 1.0 - pearson(pred, target).rho;
}

Var mse_loss(const Var& pred, std::span<const double> target) {
  check_lengths("mse_loss", pred.size(), target.size(), 1);
  const auto x = pred.value();
  const double n = static_cast<double>(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = x[i] - target[i];
    acc += r * r;
  }
  std::vector<double> tgt(target.begin(), target.end());
  const std::size_t ip = pred.id();
  return pred.tape().record({1}, {acc / n}, {pred}, [ip, n, tgt = std::move(tgt)](numerics::Tape& t, std::size_t self) {
    const double g = t.out_grad(self)[0];
    auto gp = t.in_grad(ip);
    if (gp.empty()) return;
    const auto& x = t.value(ip);
    for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += g * 2.0 * (x[i] - tgt[i]) / n;
  });
}

LossValue total_loss(const Var& pred, std::span<const double> target, double lambda_pcc) {
  if (!(lambda_pcc >= 0.0)) throw ConfigError("total_loss: lambda_pcc must be >= 0");
  const Var mse = mse_loss(pred, target);
  if (lambda_pcc == 0.0) return {mse, false};
  try {
    const Var pcc = pcc_loss(pred, target);
    const Var scaled = pred.tape().record({1}, {lambda_pcc * pcc.item()}, {pcc},
                                          [ip = pcc.id(), lambda_pcc](numerics::Tape& t, std::size_t self) {
                                            if (auto g = t.in_grad(ip); !g.empty()) g[0] += lambda_pcc * t.out_grad(self)[0];
                                          });
    return {numerics::add(mse, scaled), false};
  } catch (const DegenerateInputError&) {
    return {mse, true};
  } catch (const PreconditionError&) {
    return {mse, true};
  }
}

double total_loss(std::span<const double> pred, std::span<const double> target, double lambda_pcc,
                  bool* pcc_fallback) {
  Tape tape(false);
  const Var p = tape.constant({pred.size(), 1}, std::vector<double>(pred.begin(), pred.end()));
  const LossValue v = total_loss(p, target, lambda_pcc);
  if (pcc_fallback) *pcc_fallback = v.pcc_fallback;
  return v.loss.item();
}

}  // namespace avqa::model
