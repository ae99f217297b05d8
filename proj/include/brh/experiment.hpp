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

#ifndef BRH_EXPERIMENT_HPP_
#define BRH_EXPERIMENT_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "brh/learning.hpp"
#include "brh/probe.hpp"

namespace brh {

// A learner maps a training sample to predictions at every operating
// control. Training loss is multiplied by t; t = 0 is the untrained learner.
class Learner {
 public:
  virtual ~Learner() = default;
  virtual std::string name() const = 0;
  // Controls in path order (information non-decreasing).
  virtual std::vector<std::vector<double>> Predict(std::span<const double> y,
                                                   std::span<const double> controls, double t,
                                                   std::uint64_t seed) const = 0;
};

// Control = ridge. Scaling the training loss by t is the same fit at
// ridge / t; t = 0 predicts the zero vector.
class KernelRidgeLearner : public Learner {
 public:
  KernelRidgeLearner(const RegressionTask& task, double lengthscale);
  std::string name() const override { return "kernel_ridge"; }
  std::vector<std::vector<double>> Predict(std::span<const double> y,
                                           std::span<const double> controls, double t,
                                           std::uint64_t seed) const override;

 private:
  KernelRidge model_;
};

// Control = Adam steps (rounded); one training run covers all checkpoints.
// seed fixes the initial weights.
class MlpLearner : public Learner {
 public:
  MlpLearner(const RegressionTask& task, MlpConfig config);
  std::string name() const override { return "mlp"; }
  std::vector<std::vector<double>> Predict(std::span<const double> y,
                                           std::span<const double> controls, double t,
                                           std::uint64_t seed) const override;

 private:
  RegressionTask task_;
  MlpConfig config_;
};

std::unique_ptr<Learner> MakeLearner(const std::string& name, const RegressionTask& task,
                                     double lengthscale, const MlpConfig& mlp);

// Loss l(s, a) = MSE of code a against sample y_s.
Matrix CodebookLoss(const std::vector<std::vector<double>>& samples, const Codebook& codebook);

// Black box over Monte Carlo samples (stimuli, uniform prior) and codebook
// codes (actions). The loss argument must be t times the codebook loss for
// some t >= 0; rows are soft assignments of the learner trained at scale t.
class LearnerBox : public BlackBox {
 public:
  LearnerBox(std::shared_ptr<const Learner> learner, std::vector<std::vector<double>> samples,
             Codebook codebook, std::uint64_t init_seed);
  BoxResponse Respond(const Matrix& loss, double control, std::uint64_t seed) const override;
  const std::vector<double>& prior() const override { return prior_; }
  std::size_t num_actions() const override { return codebook_.codes.size(); }
  const Matrix& base_loss() const { return base_loss_; }

 private:
  std::shared_ptr<const Learner> learner_;
  std::vector<std::vector<double>> samples_;
  Codebook codebook_;
  std::uint64_t init_seed_;
  std::vector<double> prior_;
  Matrix base_loss_;
};

struct ExperimentConfig {
  std::string scale = "desk";
  std::vector<std::string> learners = {"kernel_ridge", "mlp"};
  int n = 100;
  double noise_sd = 0.15;
  int mc_samples = 200;
  int pilot_samples = 16;
  int bootstrap = 50;
  int controls = 10;
  std::size_t codes = 64;
  std::vector<double> t_nodes = UniformNodes(8);
  double lengthscale = 0.22;
  double ridge_max = 300.0;
  double ridge_min = 0.3;
  int steps_min = 25;
  int steps_max = 3200;
  MlpConfig mlp;
  double anchor = 1.0;
  std::uint64_t seed = 20240601;

  static ExperimentConfig Desk();
  static ExperimentConfig Paper();
  // Throws ConfigError naming the field.
  void Validate() const;
  // Controls in path order for a learner.
  std::vector<double> ControlGrid(const std::string& learner) const;
};

// Percentile band over bootstrap replicates; NaN when no replicate succeeded.
struct Band {
  double p05 = 0.0;
  double p95 = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

struct CurvePoint {
  double control = 0.0;
  double loss = 0.0;
  double certificate = 0.0;
  double beta_hat = 0.0;
  double info_native = 0.0;
  double info_shannon_per_n = 0.0;
  // L(t) at the loss-scaling nodes.
  std::vector<double> scaled_loss;
  Band loss_band;
  Band certificate_band;
  Band info_native_band;
  Band info_shannon_band;
};

struct LearnerCurve {
  std::string learner;
  std::vector<CurvePoint> points;
  // Bootstrap replicates where path recovery failed.
  int failed_replicates = 0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<LearnerCurve> curves;
  double codebook_temperature = 0.0;
  int codebook_iterations = 0;
  std::vector<std::pair<std::string, double>> timings;
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
};

// Stage seeds derived from config.seed: pilot samples, Monte Carlo samples,
// learner initialization, codebook, bootstrap.
enum ExperimentStage : std::uint64_t {
  kStagePilot = 11,
  kStageSamples = 12,
  kStageInit = 13,
  kStageCodebook = 14,
  kStageBootstrap = 15,
};

// Monte Carlo training samples of the config, in stimulus order.
std::vector<std::vector<double>> MonteCarloSamples(const ExperimentConfig& config);

// k-means codebook over pilot predictions of every configured learner at
// every control and loss scale. Pilot learners use initialization indices
// past the Monte Carlo range.
Codebook PilotCodebook(const ExperimentConfig& config);

// If out_dir is non-empty, each finished stage writes its outputs there, so a
// failure leaves the completed parts on disk. Failures are rethrown with the
// stage name prepended.
ExperimentReport RunExperiment(const ExperimentConfig& config, const std::string& out_dir = "");

ExperimentConfig ExperimentConfigFromJson(const std::string& text, const std::string& scale);

void WriteCurvesCsv(const ExperimentReport& report, const std::string& path);
std::string ReportJson(const ExperimentReport& report);

}  // namespace brh

#endif  // BRH_EXPERIMENT_HPP_
