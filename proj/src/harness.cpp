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

#include "avqa/harness.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <ostream>
#include <sstream>

#include "avqa/binary_io.hpp"
#include "avqa/checkpoint.hpp"
#include "avqa/csv.hpp"
#include "avqa/dataset_io.hpp"
#include "avqa/gradcheck.hpp"
#include "avqa/metrics.hpp"

namespace avqa::harness {

namespace fs = std::filesystem;
using model::ClipSample;

namespace {

constexpr const char* kTrainFile = "train.avqd";
constexpr const char* kValFile = "val.avqd";
constexpr const char* kTestFile = "test.avqd";

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw UsageError("an output directory is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
}

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

std::string seeds_text(const std::vector<std::uint64_t>& seeds) {
  std::string s;
  for (std::size_t i = 0; i < seeds.size(); ++i) s += (i ? "," : "") + std::to_string(seeds[i]);
  return s;
}

void require_seeds(const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw UsageError("at least one seed is required");
}

std::string flag(bool b) { return b ? "1" : "0"; }

std::string toggles_text(const Toggles& t) {
  return "use_avm=" + flag(t.avm) + "\nuse_vcm=" + flag(t.vcm) + "\nuse_acm=" + flag(t.acm) + "\n";
}

// Test-set scores, with a constant prediction vector scored as uncorrelated.
struct Scores {
  double plcc_fitted = 0.0;
  double srocc = 0.0;
};

Scores score(std::span<const double> pred, std::span<const double> mos) {
  try {
    const metrics::EvalReport r = metrics::evaluate(pred, mos);
    return {r.plcc_fitted, r.srocc};
  } catch (const DegenerateInputError&) {
    return {0.0, model::safe_srocc(pred, mos)};
  }
}

std::vector<double> targets(std::span<const ClipSample> clips) {
  std::vector<double> y(clips.size());
  for (std::size_t i = 0; i < clips.size(); ++i) y[i] = clips[i].mos;
  return y;
}

// Value as it reads back from the CSV.
double rounded(double v) { return std::strtod(fmt(v).c_str(), nullptr); }

}  // namespace

int exit_code_for(const std::exception& e) noexcept {
  if (dynamic_cast<const UsageError*>(&e) || dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const IoError*>(&e)) return kExitIo;
  if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const DimensionError*>(&e)) return kExitFormat;
  return kExitFailure;
}

synth::ScenarioMix DataSpec::scenario_mix() const {
  synth::ScenarioMix m;
  if (mix != "mixed") m = synth::ScenarioMix::only(synth::parse_mode(mix), video_max, audio_max);
  m.video_max = video_max;
  m.audio_max = audio_max;
  m.validate();
  return m;
}

synth::GeneratorSpec DataSpec::generator() const { return synth::GeneratorSpec::make_default(profile_seed); }

std::string DataSpec::to_text() const {
  std::ostringstream s;
  s << "clips=" << clips << "\ndataset_seed=" << dataset_seed << "\nprofile_seed=" << profile_seed << "\nmix=" << mix
    << "\nvideo_max=" << fmt(video_max) << "\naudio_max=" << fmt(audio_max) << '\n';
  return s.str();
}

model::TrainHyper HyperOptions::resolve() const {
  model::TrainHyper h = paper ? model::TrainHyper::paper() : model::TrainHyper::desk();
  if (learning_rate) h.learning_rate = *learning_rate;
  if (batch_size) h.batch_size = *batch_size;
  if (max_epochs) h.max_epochs = *max_epochs;
  if (patience) h.patience = *patience;
  h.validate();
  return h;
}

std::string HyperOptions::to_text() const {
  const model::TrainHyper h = resolve();
  std::ostringstream s;
  s << "preset=" << h.preset << "\nlearning_rate=" << fmt(h.learning_rate) << "\nbatch_size=" << h.batch_size
    << "\nweight_decay=" << fmt(h.weight_decay) << "\nmax_epochs=" << h.max_epochs << "\npatience=" << h.patience
    << "\nlambda_pcc=" << fmt(lambda_pcc) << '\n';
  return s.str();
}

std::vector<Toggles> ablation_grid() {
  return {{false, false, false}, {true, false, false}, {true, true, false}, {true, false, true}, {true, true, true}};
}

std::string toggle_label(const Toggles& t) {
  auto c = [](bool b) { return b ? "+" : "-"; };
  return std::string(c(t.avm)) + "," + c(t.vcm) + "," + c(t.acm);
}

model::ModelConfig config_for(std::span<const ClipSample> samples, const Toggles& t, double lambda_pcc,
                              std::uint64_t seed) {
  if (samples.empty()) throw DegenerateInputError("config_for: empty dataset");
  const ClipSample& s = samples.front();
  if (s.visual.rank() != 4) throw DimensionError("config_for: visual features must be T x C x H x W");
  model::ModelConfig cfg;
  cfg.frames = s.visual.shape[0];
  cfg.channels = s.visual.shape[1];
  cfg.height = s.visual.shape[2];
  cfg.width = s.visual.shape[3];
  cfg.audio_dim = s.audio.size();
  cfg.artifact_types = s.artifacts.types;
  cfg.use_avm = t.avm;
  cfg.use_vcm = t.vcm;
  cfg.use_acm = t.acm;
  cfg.lambda_pcc = lambda_pcc;
  cfg.seed = seed;
  cfg.validate();
  return cfg;
}

void write_run_meta(const std::string& dir, const std::string& command, const std::string& config_text,
                    const std::vector<std::uint64_t>& seeds, const std::string& preset) {
  std::string text = "command=" + command + "\nconfig_hash=" + io::fnv1a_hex(config_text) +
                     "\nseeds=" + seeds_text(seeds) + "\npreset=" + preset + "\n\n" + config_text;
  io::write_file(join(dir, "run-meta.txt"), text);
}

int cmd_synth_gen(const SynthGenOptions& opt, std::ostream& out) {
  if (opt.data.clips == 0) throw UsageError("synth-gen: --clips must be positive");
  const auto counts = synth::split_counts(opt.data.clips);
  if (counts[1] == 0 || counts[2] == 0) {
    throw UsageError("synth-gen: " + std::to_string(opt.data.clips) + " clips leave an empty validation or test split");
  }
  const synth::GeneratorSpec spec = opt.data.generator();
  const synth::DatasetSplit split =
      synth::generate_split(counts[0], counts[1], counts[2], opt.data.scenario_mix(), spec, opt.data.dataset_seed);
  ensure_dir(opt.out_dir);

  const std::pair<const char*, const std::vector<ClipSample>*> files[] = {
      {kTrainFile, &split.train}, {kValFile, &split.val}, {kTestFile, &split.test}};
  for (const auto& [name, clips] : files) {
    const std::string bytes = synth::encode_dataset(*clips);
    io::write_file(join(opt.out_dir, name), bytes);
    out << name << ' ' << clips->size() << ' ' << io::fnv1a_hex(bytes) << '\n';
  }
  write_run_meta(opt.out_dir, "synth-gen", opt.data.to_text(), {opt.data.dataset_seed}, "none");
  return kExitOk;
}

int cmd_train(const TrainOptions& opt, std::ostream& out) {
  require_seeds(opt.seeds);
  const model::TrainHyper hyper = opt.hyper.resolve();
  const auto train_set = synth::read_dataset(join(opt.data_dir, kTrainFile));
  const auto val_set = synth::read_dataset(join(opt.data_dir, kValFile));
  ensure_dir(opt.out_dir);

  for (std::uint64_t seed : opt.seeds) {
    const model::ModelConfig cfg = config_for(train_set, opt.toggles, opt.hyper.lambda_pcc, seed);
    model::TrainResult r = model::train(train_set, val_set, cfg, hyper);

    CsvWriter history({"epoch", "train_loss", "val_plcc", "val_srocc"});
    for (const auto& e : r.history) {
      history.add_row({std::to_string(e.epoch), fmt(e.train_loss), fmt(e.val_plcc), fmt(e.val_srocc)});
    }
    const std::string tag = "seed" + std::to_string(seed);
    history.write(join(opt.out_dir, "history_" + tag + ".csv"));
    const std::string meta = "preset=" + hyper.preset + "\nbest_epoch=" + std::to_string(r.best_epoch) +
                             "\nbest_val_srocc=" + fmt(r.best_val_srocc) + "\n";
    model::save_checkpoint(join(opt.out_dir, "checkpoint_" + tag + ".ckpt"), r.model, meta);
    out << "seed " << seed << ": " << r.history.size() << " epochs, best epoch " << r.best_epoch << ", val srocc "
        << fmt(r.best_val_srocc) << (r.early_stopped ? " (early stop)" : "") << '\n';
  }
  write_run_meta(opt.out_dir, "train",
                 "data_dir=" + opt.data_dir + "\n" + toggles_text(opt.toggles) + opt.hyper.to_text(), opt.seeds,
                 hyper.preset);
  return kExitOk;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out) {
  model::Checkpoint ck = model::load_checkpoint(opt.checkpoint);
  const auto data = synth::read_dataset(opt.dataset);
  const std::vector<double> pred = ck.model.predict_scores(data);
  const std::vector<double> mos = targets(data);
  const metrics::EvalReport r = metrics::evaluate(pred, mos);
  ensure_dir(opt.out_dir);

  CsvWriter rows({"index", "prediction", "mos"});
  for (std::size_t i = 0; i < pred.size(); ++i) rows.add_row({std::to_string(i), fmt(pred[i]), fmt(mos[i])});
  rows.write(join(opt.out_dir, "predictions.csv"));
  write_values(join(opt.out_dir, "predictions.txt"), pred);
  write_values(join(opt.out_dir, "mos.txt"), mos);

  CsvWriter report({"n", "plcc_raw", "plcc_fitted", "srocc", "beta1", "beta2", "beta3", "beta4", "fit_converged"});
  report.add_row({std::to_string(r.n), fmt(r.plcc_raw), fmt(r.plcc_fitted), fmt(r.srocc), fmt(r.logistic_params[0]),
                  fmt(r.logistic_params[1]), fmt(r.logistic_params[2]), fmt(r.logistic_params[3]),
                  flag(r.fit_converged)});
  report.write(join(opt.out_dir, "report.csv"));
  out << "n " << r.n << ", plcc " << fmt(r.plcc_fitted) << ", srocc " << fmt(r.srocc) << '\n';
  write_run_meta(opt.out_dir, "eval", "checkpoint=" + opt.checkpoint + "\ndataset=" + opt.dataset + "\n",
                 {ck.model.config().seed}, "none");
  return kExitOk;
}

int cmd_ablate(const AblateOptions& opt, std::ostream& out) {
  require_seeds(opt.seeds);
  const model::TrainHyper hyper = opt.hyper.resolve();
  const auto train_set = synth::read_dataset(join(opt.data_dir, kTrainFile));
  const auto val_set = synth::read_dataset(join(opt.data_dir, kValFile));
  const auto test_set = synth::read_dataset(join(opt.data_dir, kTestFile));
  const std::vector<double> mos = targets(test_set);
  ensure_dir(opt.out_dir);

  CsvWriter csv({"row", "avm", "vcm", "acm", "seed", "plcc_fitted", "srocc"});
  std::vector<std::vector<std::string>> mean_rows;
  for (const Toggles& t : ablation_grid()) {
    double plcc_sum = 0.0, srocc_sum = 0.0;
    for (std::uint64_t seed : opt.seeds) {
      model::TrainResult r = model::train(train_set, val_set, config_for(train_set, t, opt.hyper.lambda_pcc, seed), hyper);
      const Scores s = score(r.model.predict_scores(test_set), mos);
      csv.add_row({"seed", t.avm ? "+" : "-", t.vcm ? "+" : "-", t.acm ? "+" : "-", std::to_string(seed),
                   fmt(s.plcc_fitted), fmt(s.srocc)});
      plcc_sum += s.plcc_fitted;
      srocc_sum += s.srocc;
    }
    const double k = static_cast<double>(opt.seeds.size());
    mean_rows.push_back({"mean", t.avm ? "+" : "-", t.vcm ? "+" : "-", t.acm ? "+" : "-", "", fmt(plcc_sum / k),
                         fmt(srocc_sum / k)});
    out << "(" << toggle_label(t) << ") mean plcc " << fmt(plcc_sum / k) << ", srocc " << fmt(srocc_sum / k) << '\n';
  }
  for (auto& row : mean_rows) csv.add_row(std::move(row));
  csv.write(join(opt.out_dir, "ablation.csv"));
  write_run_meta(opt.out_dir, "ablate", "data_dir=" + opt.data_dir + "\n" + opt.hyper.to_text(), opt.seeds,
                 hyper.preset);
  return kExitOk;
}

int cmd_asymmetric(const AsymmetricOptions& opt, std::ostream& out) {
  if (opt.runs == 0) throw UsageError("asymmetric: --runs must be positive");
  if (opt.n_train == 0 || opt.n_val == 0 || opt.n_test == 0) throw UsageError("asymmetric: set sizes must be positive");
  const model::TrainHyper hyper = opt.hyper.resolve();
  const synth::GeneratorSpec spec = synth::GeneratorSpec::make_default(opt.profile_seed);
  using synth::DistortionMode;
  using synth::ScenarioMix;
  const double sv = opt.video_severity, sa = opt.audio_severity;

  const ScenarioMix mixed = ScenarioMix::only(DistortionMode::both, sv, sa);
  const auto train_set = synth::generate_set(opt.n_train, mixed, spec, opt.dataset_seed, 0);
  const auto val_set = synth::generate_set(opt.n_val, mixed, spec, opt.dataset_seed, 1);
  struct Condition {
    const char* name;
    std::vector<ClipSample> clips;
    std::vector<double> mos;
  };
  Condition conditions[] = {
      {"video_only", synth::generate_set(opt.n_test, ScenarioMix::only(DistortionMode::video_only, sv, sa), spec,
                                         opt.dataset_seed, 3), {}},
      {"audio_only", synth::generate_set(opt.n_test, ScenarioMix::only(DistortionMode::audio_only, sv, sa), spec,
                                         opt.dataset_seed, 4), {}},
  };
  for (Condition& c : conditions) c.mos = targets(c.clips);
  ensure_dir(opt.out_dir);

  const std::pair<const char*, Toggles> models[] = {
      {"baseline", {false, false, false}}, {"avm_only", {true, false, false}}, {"full", {true, true, true}}};

  CsvWriter csv({"kind", "model", "condition", "run", "srocc"});
  std::vector<std::vector<std::string>> summary;
  for (const auto& [name, toggles] : models) {
    std::vector<std::vector<double>> per_condition(std::size(conditions));
    for (std::size_t run = 0; run < opt.runs; ++run) {
      model::TrainResult r = model::train(train_set, val_set, config_for(train_set, toggles, opt.hyper.lambda_pcc, run),
                                          hyper);
      for (std::size_t c = 0; c < std::size(conditions); ++c) {
        const double s = model::safe_srocc(r.model.predict_scores(conditions[c].clips), conditions[c].mos);
        per_condition[c].push_back(rounded(s));
      }
    }
    for (std::size_t c = 0; c < std::size(conditions); ++c) {
      const auto& v = per_condition[c];
      for (std::size_t run = 0; run < v.size(); ++run) {
        csv.add_row({"run", name, conditions[c].name, std::to_string(run), fmt(v[run])});
      }
      const double q1 = quantile(v, 0.25), med = quantile(v, 0.5), q3 = quantile(v, 0.75);
      summary.push_back({"median", name, conditions[c].name, "", fmt(med)});
      summary.push_back({"q1", name, conditions[c].name, "", fmt(q1)});
      summary.push_back({"q3", name, conditions[c].name, "", fmt(q3)});
      summary.push_back({"iqr", name, conditions[c].name, "", fmt(q3 - q1)});
      out << name << " on " << conditions[c].name << ": median srocc " << fmt(med) << ", iqr " << fmt(q3 - q1) << '\n';
    }
  }
  for (auto& row : summary) csv.add_row(std::move(row));
  csv.write(join(opt.out_dir, "asymmetric.csv"));

  std::ostringstream cfg;
  cfg << "runs=" << opt.runs << "\ndataset_seed=" << opt.dataset_seed << "\nprofile_seed=" << opt.profile_seed
      << "\nn_train=" << opt.n_train << "\nn_val=" << opt.n_val << "\nn_test=" << opt.n_test
      << "\nvideo_severity=" << fmt(sv) << "\naudio_severity=" << fmt(sa) << '\n'
      << opt.hyper.to_text();
  std::vector<std::uint64_t> seeds(opt.runs);
  for (std::size_t i = 0; i < opt.runs; ++i) seeds[i] = i;
  write_run_meta(opt.out_dir, "asymmetric", cfg.str(), seeds, hyper.preset);
  return kExitOk;
}

int cmd_significance(const SignificanceOptions& opt, std::ostream& out) {
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) throw UsageError("significance: alpha must lie in (0, 1)");
  const std::vector<double> a = read_values(opt.pred_a);
  const std::vector<double> b = read_values(opt.pred_b);
  const std::vector<double> m = read_values(opt.mos);
  if (a.size() != m.size() || b.size() != m.size()) {
    throw DimensionError("significance: misaligned inputs (" + std::to_string(a.size()) + ", " +
                         std::to_string(b.size()) + " predictions for " + std::to_string(m.size()) + " MOS values)");
  }
  std::vector<double> err_a(m.size()), err_b(m.size());
  double mae_a = 0.0, mae_b = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    err_a[i] = std::abs(a[i] - m[i]);
    err_b[i] = std::abs(b[i] - m[i]);
    mae_a += err_a[i];
    mae_b += err_b[i];
  }
  const double n = static_cast<double>(m.size());
  mae_a /= n;
  mae_b /= n;

  CsvWriter csv({"quantity", "value", "significant"});
  csv.add_row({"n", std::to_string(m.size()), ""});
  csv.add_row({"mae_a", fmt(mae_a), ""});
  csv.add_row({"mae_b", fmt(mae_b), ""});
  csv.add_row({"mae_difference", fmt(mae_a - mae_b), ""});
  bool degenerate = false;
  try {
    const metrics::SignificanceReport r = metrics::paired_tests(err_a, err_b, opt.alpha);
    auto sig = [&](double p) { return flag(p < opt.alpha); };
    csv.add_row({"paired_t_statistic", fmt(r.t_statistic), ""});
    csv.add_row({"paired_t_two_sided", fmt(r.t_p_two_sided), sig(r.t_p_two_sided)});
    csv.add_row({"wilcoxon_w_plus", fmt(r.wilcoxon_w_plus), ""});
    csv.add_row({"wilcoxon_two_sided", fmt(r.wilcoxon_p_two_sided), sig(r.wilcoxon_p_two_sided)});
    csv.add_row({"wilcoxon_one_sided", fmt(r.wilcoxon_p_one_sided), sig(r.wilcoxon_p_one_sided)});
    csv.add_row({"wilcoxon_method", r.wilcoxon_exact ? "exact" : "normal", ""});
    out << "t-test p " << fmt(r.t_p_two_sided) << ", wilcoxon p " << fmt(r.wilcoxon_p_two_sided) << " (two-sided) "
        << fmt(r.wilcoxon_p_one_sided) << " (one-sided)\n";
  } catch (const DegenerateInputError& e) {
    degenerate = true;
    for (const char* q : {"paired_t_statistic", "paired_t_two_sided", "wilcoxon_w_plus", "wilcoxon_two_sided",
                          "wilcoxon_one_sided", "wilcoxon_method"}) {
      csv.add_row({q, "", ""});
    }
    out << "degenerate: " << e.what() << '\n';
  }
  csv.add_row({"alpha", fmt(opt.alpha), ""});
  csv.add_row({"degenerate", flag(degenerate), ""});
  ensure_dir(opt.out_dir);
  csv.write(join(opt.out_dir, "significance.csv"));
  write_run_meta(opt.out_dir, "significance",
                 "pred_a=" + opt.pred_a + "\npred_b=" + opt.pred_b + "\nmos=" + opt.mos + "\nalpha=" + fmt(opt.alpha) +
                     "\n",
                 {}, "none");
  return kExitOk;
}

int cmd_gradcheck(const GradcheckOptions& opt, std::ostream& out) {
  if (opt.batch < 2) throw UsageError("gradcheck: --batch must be at least 2");
  const synth::GeneratorSpec spec = synth::GeneratorSpec::make_default(opt.profile_seed);
  const auto batch = synth::generate_set(opt.batch, synth::ScenarioMix{}, spec, opt.dataset_seed, 0);
  model::ModelConfig cfg = spec.model_config();
  cfg.seed = opt.model_seed;
  model::AvqaModel m(cfg);
  const std::vector<double> y = targets(batch);

  const numerics::ScalarFn loss = [&](numerics::Tape& tape) {
    const model::ForwardOutput fwd = m.forward(tape, batch);
    return model::total_loss(fwd.score, y, cfg.lambda_pcc).loss;
  };
  numerics::GradientHook fault;
  if (opt.inject_fault) {
    fault = [](std::span<numerics::Parameter* const> params) {
      double* worst = nullptr;
      for (numerics::Parameter* p : params) {
        for (double& g : p->tensor.grad) {
          if (!worst || std::abs(g) > std::abs(*worst)) worst = &g;
        }
      }
      if (worst) *worst *= 1.1;
    };
  }

  CsvWriter csv({"group", "entries", "max_rel_error", "worst_parameter", "worst_index", "analytic", "numeric",
                 "fd_resolution", "pass"});
  bool ok = true;
  for (const model::ParameterGroup& g : m.parameter_groups()) {
    const numerics::GradCheckReport r = numerics::finite_difference_report(loss, g.params, opt.epsilon, fault);
    const bool pass = r.max_relative_error < opt.threshold;
    ok = ok && pass;
    // Smallest gradient difference a central difference can resolve at this
    // step: one rounding of the loss value, divided by the stencil width.
    const double resolution = std::abs(r.function_value) * DBL_EPSILON / (2.0 * opt.epsilon);
    csv.add_row({g.name, std::to_string(r.entries), fmt(r.max_relative_error), r.worst_parameter,
                 std::to_string(r.worst_index), fmt(r.worst_analytic), fmt(r.worst_numeric), fmt(resolution),
                 flag(pass)});
  }
  out << csv.str();
  if (!opt.out_dir.empty()) {
    ensure_dir(opt.out_dir);
    csv.write(join(opt.out_dir, "gradcheck.csv"));
    std::ostringstream c;
    c << "batch=" << opt.batch << "\nepsilon=" << fmt(opt.epsilon) << "\nthreshold=" << fmt(opt.threshold)
      << "\ndataset_seed=" << opt.dataset_seed << "\nprofile_seed=" << opt.profile_seed
      << "\ninject_fault=" << flag(opt.inject_fault) << '\n';
    write_run_meta(opt.out_dir, "gradcheck", c.str(), {opt.model_seed}, "none");
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace avqa::harness
