// Copyright 2026 The brh Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "brh/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <limits>
#include <random>
#include <set>

#include "brh/errors.hpp"
#include "brh/io.hpp"
#include "brh/numeric.hpp"

namespace brh {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Body>
void ParallelFor(std::size_t n, Body&& body) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(brh_experiment_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

// Runs fn, prefixing any error with the stage name. Configuration errors keep
// their type; everything else becomes a numeric failure.
template <typename Fn>
void Stage(const std::string& name, std::vector<std::pair<std::string, double>>& timings, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError("experiment stage '" + name + "': " + e.what());
  } catch (const std::exception& e) {
    throw NumericFailure("experiment stage '" + name + "': " + e.what());
  }
  timings.emplace_back(name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
}

double SquaredDistanceMean(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double Trapezoid(std::span<const double> t, std::span<const double> v) {
  double acc = 0.0;
  for (std::size_t j = 1; j < t.size(); ++j) acc += 0.5 * (t[j] - t[j - 1]) * (v[j] + v[j - 1]);
  return acc;
}

// Linear interpolation between order statistics; NaN entries are dropped.
double Percentile(std::vector<double> v, double q) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

Band MakeBand(const std::vector<double>& v) {
  return {Percentile(v, 0.05), Percentile(v, 0.95), Percentile(v, 0.10), Percentile(v, 0.90)};
}

// Per-learner Monte Carlo cache: expected codebook loss of every sample at
// every (control, t) and the soft-assignment rows at t = 1.
struct LearnerCache {
  // [control][node][sample]
  std::vector<std::vector<std::vector<double>>> expected_loss;
  // [control][sample] -> row over codes
  std::vector<std::vector<std::vector<double>>> rows;
};

struct PathEstimate {
  std::vector<double> loss;
  std::vector<double> certificate;
  std::vector<double> beta_hat;
  std::vector<double> info_native;
  std::vector<double> info_shannon_per_n;
  std::vector<std::vector<double>> scaled_loss;
  bool path_ok = true;
};

// Everything recomputed from the sample weights, so the same routine serves
// the point estimate (uniform weights) and every bootstrap replicate.
PathEstimate Evaluate(const LearnerCache& cache, std::span<const double> weights,
                      std::span<const double> t_nodes, double n, double anchor) {
  const std::size_t nk = cache.expected_loss.size();
  const std::size_t ns = weights.size();
  PathEstimate out;
  out.loss.resize(nk);
  out.certificate.resize(nk);
  out.beta_hat.assign(nk, kNaN);
  out.info_native.assign(nk, kNaN);
  out.info_shannon_per_n.resize(nk);
  out.scaled_loss.resize(nk);
  std::vector<ProbeRecord> records(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    std::vector<double> lt(t_nodes.size(), 0.0);
    for (std::size_t j = 0; j < t_nodes.size(); ++j) {
      for (std::size_t s = 0; s < ns; ++s) lt[j] += weights[s] * cache.expected_loss[k][j][s];
    }
    out.loss[k] = lt.back();
    out.certificate[k] = Trapezoid(t_nodes, lt);
    out.scaled_loss[k] = lt;

    const auto& rows = cache.rows[k];
    const std::size_t na = rows.front().size();
    std::vector<double> m(na, 0.0);
    for (std::size_t s = 0; s < ns; ++s) {
      if (weights[s] == 0.0) continue;
      for (std::size_t a = 0; a < na; ++a) m[a] += weights[s] * rows[s][a];
    }
    double info = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      if (weights[s] == 0.0) continue;
      double row_info = 0.0;
      for (std::size_t a = 0; a < na; ++a) {
        const double q = rows[s][a];
        if (q > 0.0) row_info += q * std::log(q / m[a]);
      }
      info += weights[s] * row_info;
    }
    out.info_shannon_per_n[k] = std::max(0.0, info) / n;

    records[k].control = static_cast<double>(k);
    records[k].loss_hat = out.loss[k];
    records[k].certificate_hat = out.certificate[k];
  }
  try {
    RecoverPath(records, anchor);
    for (std::size_t k = 0; k < nk; ++k) {
      out.beta_hat[k] = records[k].beta_hat;
      out.info_native[k] = records[k].info_hat;
    }
  } catch (const DomainError&) {
    out.path_ok = false;
  }
  return out;
}

std::vector<double> Column(const std::vector<PathEstimate>& reps, std::size_t k,
                           std::vector<double> PathEstimate::*field) {
  std::vector<double> v;
  v.reserve(reps.size());
  for (const auto& r : reps) v.push_back((r.*field)[k]);
  return v;
}

std::vector<std::vector<double>> SamplesFor(const RegressionTask& task, std::uint64_t seed,
                                            std::uint64_t stage, std::size_t count) {
  std::vector<std::vector<double>> ys(count);
  for (std::size_t s = 0; s < count; ++s) ys[s] = SampleTask(task, DeriveSeed(seed, stage, s));
  return ys;
}

}  // namespace

KernelRidgeLearner::KernelRidgeLearner(const RegressionTask& task, double lengthscale)
    : model_(task, lengthscale) {}

std::vector<std::vector<double>> KernelRidgeLearner::Predict(std::span<const double> y,
                                                             std::span<const double> controls,
                                                             double t, std::uint64_t) const {
  if (!(t >= 0.0)) throw DomainError("kernel ridge learner: loss scale must be >= 0");
  std::vector<std::vector<double>> out;
  out.reserve(controls.size());
  for (double ridge : controls) {
    if (!(ridge > 0.0)) throw DomainError("kernel ridge learner: ridge must be > 0");
    if (t == 0.0) {
      out.emplace_back(y.size(), 0.0);
    } else {
      out.push_back(model_.Fit(y, ridge / t));
    }
  }
  return out;
}

MlpLearner::MlpLearner(const RegressionTask& task, MlpConfig config)
    : task_(task), config_(config) {}

std::vector<std::vector<double>> MlpLearner::Predict(std::span<const double> y,
                                                     std::span<const double> controls, double t,
                                                     std::uint64_t seed) const {
  if (!(t >= 0.0)) throw DomainError("mlp learner: loss scale must be >= 0");
  std::vector<int> steps;
  for (double c : controls) {
    if (!(c >= 0.0)) throw DomainError("mlp learner: step count must be >= 0");
    steps.push_back(static_cast<int>(std::lround(c)));
  }
  if (t == 0.0) {
    // Zero loss, zero gradient: Adam leaves the initial weights in place.
    const int zero = 0;
    const auto init = MlpFit(task_, y, config_, std::span<const int>(&zero, 1), seed, 0.0);
    return std::vector<std::vector<double>>(controls.size(), init.front());
  }
  return MlpFit(task_, y, config_, steps, seed, t);
}

std::unique_ptr<Learner> MakeLearner(const std::string& name, const RegressionTask& task,
                                     double lengthscale, const MlpConfig& mlp) {
  if (name == "kernel_ridge") return std::make_unique<KernelRidgeLearner>(task, lengthscale);
  if (name == "mlp") return std::make_unique<MlpLearner>(task, mlp);
  throw ConfigError("unknown learner '" + name + "'; valid: kernel_ridge, mlp");
}

Matrix CodebookLoss(const std::vector<std::vector<double>>& samples, const Codebook& codebook) {
  Matrix loss(samples.size(), codebook.codes.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t a = 0; a < codebook.codes.size(); ++a) {
      loss(s, a) = SquaredDistanceMean(codebook.codes[a], samples[s]);
    }
  }
  return loss;
}

LearnerBox::LearnerBox(std::shared_ptr<const Learner> learner,
                       std::vector<std::vector<double>> samples, Codebook codebook,
                       std::uint64_t init_seed)
    : learner_(std::move(learner)), samples_(std::move(samples)), codebook_(std::move(codebook)),
      init_seed_(init_seed) {
  if (samples_.empty()) throw ConfigError("learner box: no samples");
  prior_.assign(samples_.size(), 1.0 / static_cast<double>(samples_.size()));
  base_loss_ = CodebookLoss(samples_, codebook_);
}

BoxResponse LearnerBox::Respond(const Matrix& loss, double control, std::uint64_t) const {
  if (loss.rows() != base_loss_.rows() || loss.cols() != base_loss_.cols()) {
    throw DomainError("learner box: loss shape does not match samples x codes");
  }
  double num = 0.0;
  double den = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < loss.data().size(); ++i) {
    num += loss.data()[i] * base_loss_.data()[i];
    den += base_loss_.data()[i] * base_loss_.data()[i];
    scale = std::max(scale, std::abs(loss.data()[i]));
  }
  const double t = den > 0.0 ? num / den : 0.0;
  for (std::size_t i = 0; i < loss.data().size(); ++i) {
    if (std::abs(loss.data()[i] - t * base_loss_.data()[i]) > 1e-9 * std::max(1.0, scale)) {
      throw DomainError("learner box: loss must be a nonnegative multiple of the codebook loss");
    }
  }
  if (t < -1e-12) throw DomainError("learner box: loss must be a nonnegative multiple of the codebook loss");
  const double tt = std::max(0.0, t);
  Matrix rows(samples_.size(), codebook_.codes.size());
  const double c = control;
  ParallelFor(samples_.size(), [&](std::size_t s) {
    const auto pred = learner_->Predict(samples_[s], std::span<const double>(&c, 1), tt,
                                        DeriveSeed(init_seed_, kStageInit, s));
    const auto w = SoftAssign(pred.front(), codebook_);
    std::copy(w.begin(), w.end(), rows.row(s).begin());
  });
  BoxResponse r;
  r.rows = std::move(rows);
  return r;
}

ExperimentConfig ExperimentConfig::Desk() { return ExperimentConfig{}; }

ExperimentConfig ExperimentConfig::Paper() {
  ExperimentConfig c;
  c.scale = "paper";
  c.mc_samples = 2000;
  c.pilot_samples = 64;
  c.bootstrap = 200;
  c.controls = 30;
  c.codes = 200;
  return c;
}

std::vector<double> ExperimentConfig::ControlGrid(const std::string& learner) const {
  if (learner == "kernel_ridge") return GeometricGrid(ridge_max, ridge_min, controls);
  if (learner == "mlp") {
    std::vector<double> g = GeometricGrid(steps_min, steps_max, controls);
    for (double& v : g) v = static_cast<double>(std::lround(v));
    return g;
  }
  throw ConfigError("unknown learner '" + learner + "'; valid: kernel_ridge, mlp");
}

void ExperimentConfig::Validate() const {
  auto require = [](bool ok, const std::string& field, const std::string& rule) {
    if (!ok) throw ConfigError("experiment config: field '" + field + "' " + rule);
  };
  require(!learners.empty(), "learners", "must list at least one learner");
  std::set<std::string> seen;
  for (const auto& l : learners) {
    require(l == "kernel_ridge" || l == "mlp", "learners",
            "has unknown learner '" + l + "'; valid: kernel_ridge, mlp");
    require(seen.insert(l).second, "learners", "lists '" + l + "' twice");
  }
  require(n >= 2, "n", "must be >= 2");
  require(noise_sd > 0.0, "noise_sd", "must be > 0");
  require(mc_samples >= 2, "mc_samples", "must be >= 2");
  require(pilot_samples >= 1, "pilot_samples", "must be >= 1");
  require(bootstrap >= 0, "bootstrap", "must be >= 0");
  require(controls >= 2, "controls", "must be >= 2");
  require(codes >= 2, "codes", "must be >= 2");
  require(t_nodes.size() >= 2 && t_nodes.front() == 0.0 && t_nodes.back() == 1.0, "t_nodes",
          "must start at 0 and end at 1");
  for (std::size_t j = 1; j < t_nodes.size(); ++j) require(t_nodes[j] > t_nodes[j - 1], "t_nodes", "must ascend");
  require(lengthscale > 0.0, "lengthscale", "must be > 0");
  require(ridge_min > 0.0 && ridge_max > ridge_min, "ridge_max", "must exceed ridge_min > 0");
  require(steps_min >= 1 && steps_max > steps_min, "steps_max", "must exceed steps_min >= 1");
  require(mlp.hidden >= 1, "mlp.hidden", "must be >= 1");
  require(mlp.lr > 0.0, "mlp.lr", "must be > 0");
  require(anchor > 0.0, "anchor", "must be > 0");
  const std::size_t pilot_points = static_cast<std::size_t>(pilot_samples) * learners.size() *
                                   static_cast<std::size_t>(controls) * t_nodes.size();
  require(pilot_points >= codes, "codes", "exceeds the number of pilot predictions");
  if (seen.count("mlp")) {
    const auto g = ControlGrid("mlp");
    for (std::size_t k = 1; k < g.size(); ++k) {
      require(g[k] > g[k - 1], "controls", "too many for the step range (rounded checkpoints repeat)");
    }
  }
}

ExperimentConfig ExperimentConfigFromJson(const std::string& text, const std::string& scale) {
  const nlohmann::json j = ParseJson(text, "experiment config");
  if (!j.is_object()) throw ConfigError("experiment config: top level must be an object");
  std::string sc = scale;
  if (sc.empty()) sc = j.value("scale", std::string("desk"));
  ExperimentConfig c;
  if (sc == "desk") {
    c = ExperimentConfig::Desk();
  } else if (sc == "paper") {
    c = ExperimentConfig::Paper();
  } else {
    throw ConfigError("experiment config: field 'scale' must be desk or paper");
  }
  // Scale presets fix the run size; the file may still override any field
  // when no scale flag is given.
  const bool preset_locked = !scale.empty();
  auto get = [&](const char* field, auto& dst) {
    if (!j.contains(field)) return;
    try {
      dst = j.at(field).get<std::remove_reference_t<decltype(dst)>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(std::string("experiment config: field '") + field + "' has the wrong type");
    }
  };
  static const std::set<std::string> known = {
      "scale", "learners", "n", "noise_sd", "mc_samples", "pilot_samples", "bootstrap",
      "controls", "codes", "t_nodes", "lengthscale", "ridge_max", "ridge_min", "steps_min",
      "steps_max", "mlp", "anchor", "seed"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("experiment config: unknown field '" + key + "'");
  }
  get("learners", c.learners);
  get("n", c.n);
  get("noise_sd", c.noise_sd);
  if (!preset_locked) {
    get("mc_samples", c.mc_samples);
    get("pilot_samples", c.pilot_samples);
    get("bootstrap", c.bootstrap);
    get("controls", c.controls);
    get("codes", c.codes);
  }
  if (j.contains("t_nodes")) {
    const auto& tn = j.at("t_nodes");
    if (tn.is_number_integer()) {
      const int count = tn.get<int>();
      if (count < 2) throw ConfigError("experiment config: field 't_nodes' must be >= 2");
      c.t_nodes = UniformNodes(count - 1);
    } else {
      get("t_nodes", c.t_nodes);
    }
  }
  get("lengthscale", c.lengthscale);
  get("ridge_max", c.ridge_max);
  get("ridge_min", c.ridge_min);
  get("steps_min", c.steps_min);
  get("steps_max", c.steps_max);
  get("anchor", c.anchor);
  get("seed", c.seed);
  if (j.contains("mlp")) {
    const auto& m = j.at("mlp");
    if (!m.is_object()) throw ConfigError("experiment config: field 'mlp' must be an object");
    for (const auto& [key, _] : m.items()) {
      if (key != "hidden" && key != "lr") throw ConfigError("experiment config: unknown field 'mlp." + key + "'");
    }
    try {
      if (m.contains("hidden")) c.mlp.hidden = m.at("hidden").get<std::size_t>();
      if (m.contains("lr")) c.mlp.lr = m.at("lr").get<double>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("experiment config: field 'mlp' has a value of the wrong type");
    }
  }
  c.Validate();
  return c;
}

std::vector<std::vector<double>> MonteCarloSamples(const ExperimentConfig& config) {
  const RegressionTask task = RegressionTask::Make(config.n, config.noise_sd);
  return SamplesFor(task, config.seed, kStageSamples, static_cast<std::size_t>(config.mc_samples));
}

Codebook PilotCodebook(const ExperimentConfig& config) {
  config.Validate();
  const RegressionTask task = RegressionTask::Make(config.n, config.noise_sd);
  const auto& t_nodes = config.t_nodes;
  std::vector<std::unique_ptr<Learner>> learners;
  std::vector<std::vector<double>> grids;
  for (const auto& name : config.learners) {
    learners.push_back(MakeLearner(name, task, config.lengthscale, config.mlp));
    grids.push_back(config.ControlGrid(name));
  }
  const auto mc = static_cast<std::size_t>(config.mc_samples);
  const auto pilots =
      SamplesFor(task, config.seed, kStagePilot, static_cast<std::size_t>(config.pilot_samples));
  const std::size_t per_pilot = learners.size() * t_nodes.size();
  std::vector<std::vector<std::vector<double>>> chunks(pilots.size() * per_pilot);
  ParallelFor(chunks.size(), [&](std::size_t i) {
    const std::size_t p = i / per_pilot;
    const std::size_t li = (i % per_pilot) / t_nodes.size();
    const std::size_t j = i % t_nodes.size();
    chunks[i] = learners[li]->Predict(pilots[p], grids[li], t_nodes[j],
                                      DeriveSeed(config.seed, kStageInit, mc + p));
  });
  std::vector<std::vector<double>> points;
  for (auto& c : chunks) {
    for (auto& v : c) points.push_back(std::move(v));
  }
  return BuildCodebook(points, config.codes, DeriveSeed(config.seed, kStageCodebook));
}

ExperimentReport RunExperiment(const ExperimentConfig& config, const std::string& out_dir) {
  config.Validate();
  ExperimentReport report;
  report.config = config;
  const std::uint64_t seed = config.seed;
  report.seeds = {{"master", seed},
                  {"pilot", DeriveSeed(seed, kStagePilot)},
                  {"samples", DeriveSeed(seed, kStageSamples)},
                  {"init", DeriveSeed(seed, kStageInit)},
                  {"codebook", DeriveSeed(seed, kStageCodebook)},
                  {"bootstrap", DeriveSeed(seed, kStageBootstrap)}};
  const RegressionTask task = RegressionTask::Make(config.n, config.noise_sd);
  const auto mc = static_cast<std::size_t>(config.mc_samples);
  const auto& t_nodes = config.t_nodes;

  std::vector<std::unique_ptr<Learner>> learners;
  std::vector<std::vector<double>> grids;
  for (const auto& name : config.learners) {
    learners.push_back(MakeLearner(name, task, config.lengthscale, config.mlp));
    grids.push_back(config.ControlGrid(name));
  }

  Codebook codebook;
  Stage("codebook", report.timings, [&] {
    codebook = PilotCodebook(config);
    report.codebook_temperature = codebook.temperature;
    report.codebook_iterations = codebook.iterations;
    if (!out_dir.empty()) {
      std::string csv;
      for (const auto& code : codebook.codes) {
        std::vector<std::string> f;
        for (double v : code) f.push_back(FormatNumber(v));
        csv += CsvLine(f);
      }
      WriteTextFile((std::filesystem::path(out_dir) / "codebook.csv").string(), csv);
    }
  });

  std::vector<std::vector<double>> samples;
  std::vector<LearnerCache> caches(learners.size());
  Stage("monte_carlo", report.timings, [&] {
    samples = MonteCarloSamples(config);
    const Matrix loss = CodebookLoss(samples, codebook);
    for (std::size_t li = 0; li < learners.size(); ++li) {
      auto& cache = caches[li];
      const std::size_t nk = grids[li].size();
      cache.expected_loss.assign(nk, std::vector<std::vector<double>>(t_nodes.size(), std::vector<double>(mc)));
      cache.rows.assign(nk, std::vector<std::vector<double>>(mc));
    }
    const std::size_t units = mc * learners.size() * t_nodes.size();
    ParallelFor(units, [&](std::size_t i) {
      const std::size_t s = i / (learners.size() * t_nodes.size());
      const std::size_t li = (i / t_nodes.size()) % learners.size();
      const std::size_t j = i % t_nodes.size();
      const auto preds = learners[li]->Predict(samples[s], grids[li], t_nodes[j],
                                               DeriveSeed(seed, kStageInit, s));
      for (std::size_t k = 0; k < preds.size(); ++k) {
        auto w = SoftAssign(preds[k], codebook);
        double el = 0.0;
        for (std::size_t a = 0; a < w.size(); ++a) el += w[a] * loss(s, a);
        caches[li].expected_loss[k][j][s] = el;
        if (j + 1 == t_nodes.size()) caches[li].rows[k][s] = std::move(w);
      }
    });
  });

  const std::vector<double> uniform(mc, 1.0 / static_cast<double>(mc));
  const double n = static_cast<double>(task.n());
  for (std::size_t li = 0; li < learners.size(); ++li) {
    LearnerCurve curve;
    curve.learner = learners[li]->name();
    Stage("estimate:" + curve.learner, report.timings, [&] {
      const PathEstimate point = Evaluate(caches[li], uniform, t_nodes, n, config.anchor);
      if (!point.path_ok) {
        throw DomainError("path recovery failed on the full sample (certificate gap not positive)");
      }
      const auto nb = static_cast<std::size_t>(config.bootstrap);
      std::vector<PathEstimate> reps(nb);
      ParallelFor(nb, [&](std::size_t b) {
        std::mt19937_64 rng(DeriveSeed(seed, kStageBootstrap, b * learners.size() + li));
        std::uniform_int_distribution<std::size_t> pick(0, mc - 1);
        std::vector<double> w(mc, 0.0);
        for (std::size_t i = 0; i < mc; ++i) w[pick(rng)] += 1.0 / static_cast<double>(mc);
        reps[b] = Evaluate(caches[li], w, t_nodes, n, config.anchor);
      });
      for (const auto& r : reps) curve.failed_replicates += r.path_ok ? 0 : 1;
      for (std::size_t k = 0; k < grids[li].size(); ++k) {
        CurvePoint p;
        p.control = grids[li][k];
        p.loss = point.loss[k];
        p.certificate = point.certificate[k];
        p.beta_hat = point.beta_hat[k];
        p.info_native = point.info_native[k];
        p.info_shannon_per_n = point.info_shannon_per_n[k];
        p.scaled_loss = point.scaled_loss[k];
        if (nb > 0) {
          p.loss_band = MakeBand(Column(reps, k, &PathEstimate::loss));
          p.certificate_band = MakeBand(Column(reps, k, &PathEstimate::certificate));
          p.info_native_band = MakeBand(Column(reps, k, &PathEstimate::info_native));
          p.info_shannon_band = MakeBand(Column(reps, k, &PathEstimate::info_shannon_per_n));
        } else {
          p.loss_band = p.certificate_band = p.info_native_band = p.info_shannon_band =
              Band{kNaN, kNaN, kNaN, kNaN};
        }
        curve.points.push_back(std::move(p));
      }
    });
    report.curves.push_back(std::move(curve));
    if (!out_dir.empty()) {
      WriteCurvesCsv(report, (std::filesystem::path(out_dir) / "curves.csv").string());
    }
  }
  return report;
}

void WriteCurvesCsv(const ExperimentReport& report, const std::string& path) {
  std::vector<std::string> header = {"learner", "control", "beta_hat", "I_native",
                                     "I_shannon_per_n", "L", "L_adv"};
  for (const char* q : {"L", "L_adv", "I_native", "I_shannon_per_n"}) {
    for (const char* b : {"p05", "p95", "p10", "p90"}) header.push_back(std::string(q) + "_" + b);
  }
  std::string csv = CsvLine(header);
  for (const auto& curve : report.curves) {
    for (const auto& p : curve.points) {
      std::vector<std::string> f = {curve.learner,
                                    FormatNumber(p.control),
                                    FormatNumber(p.beta_hat),
                                    FormatNumber(p.info_native),
                                    FormatNumber(p.info_shannon_per_n),
                                    FormatNumber(p.loss),
                                    FormatNumber(p.certificate)};
      for (const Band* b : {&p.loss_band, &p.certificate_band, &p.info_native_band, &p.info_shannon_band}) {
        for (double v : {b->p05, b->p95, b->p10, b->p90}) f.push_back(FormatNumber(v));
      }
      csv += CsvLine(f);
    }
  }
  WriteTextFile(path, csv);
}

std::string ReportJson(const ExperimentReport& report) {
  const ExperimentConfig& c = report.config;
  nlohmann::json j;
  j["config"] = {{"scale", c.scale},
                 {"learners", c.learners},
                 {"n", c.n},
                 {"noise_sd", c.noise_sd},
                 {"mc_samples", c.mc_samples},
                 {"pilot_samples", c.pilot_samples},
                 {"bootstrap", c.bootstrap},
                 {"controls", c.controls},
                 {"codes", c.codes},
                 {"t_nodes", c.t_nodes},
                 {"lengthscale", c.lengthscale},
                 {"ridge_max", c.ridge_max},
                 {"ridge_min", c.ridge_min},
                 {"steps_min", c.steps_min},
                 {"steps_max", c.steps_max},
                 {"mlp", {{"hidden", c.mlp.hidden}, {"lr", c.mlp.lr}, {"beta1", c.mlp.beta1},
                          {"beta2", c.mlp.beta2}, {"eps", c.mlp.eps}}},
                 {"anchor", c.anchor},
                 {"seed", c.seed}};
  j["defaults"] = {
      {"mlp_init", "uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases"},
      {"pilot_schedule",
       "pilot samples run through every learner, control and loss scale; all outputs are clustered"},
      {"codebook_temperature", "median pairwise code distance / sqrt(2)"},
      {"loss_scale_kernel_ridge", "fit at ridge / t; t = 0 predicts zero"},
      {"loss_scale_mlp", "training loss multiplied by t inside Adam; t = 0 keeps the initial network"},
      {"bootstrap", "Monte Carlo samples resampled with replacement; 5-95 and 10-90 percentiles"}};
  nlohmann::json seeds = nlohmann::json::object();
  for (const auto& [k, v] : report.seeds) seeds[k] = v;
  j["seeds"] = seeds;
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [k, v] : report.timings) timings[k] = v;
  j["timings_seconds"] = timings;
  j["codebook"] = {{"codes", c.codes},
                   {"temperature", report.codebook_temperature},
                   {"iterations", report.codebook_iterations}};
  nlohmann::json curves = nlohmann::json::array();
  for (const auto& curve : report.curves) {
    curves.push_back({{"learner", curve.learner},
                      {"points", curve.points.size()},
                      {"failed_bootstrap_replicates", curve.failed_replicates}});
  }
  j["curves"] = curves;
  return j.dump(2) + "\n";
}

}  // namespace brh
