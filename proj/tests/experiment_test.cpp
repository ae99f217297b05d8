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

#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "brh/errors.hpp"
#include "brh/experiment.hpp"
#include "brh/io.hpp"

namespace brh {
namespace {

ExperimentConfig Small() {
  ExperimentConfig c;
  c.learners = {"kernel_ridge"};
  c.n = 30;
  c.mc_samples = 24;
  c.pilot_samples = 4;
  c.bootstrap = 6;
  c.controls = 5;
  c.codes = 12;
  c.t_nodes = UniformNodes(4);
  return c;
}

TEST(Experiment, SmallRunProperties) {
  const ExperimentConfig c = Small();
  const ExperimentReport r = RunExperiment(c);
  ASSERT_EQ(r.curves.size(), 1u);
  const LearnerCurve& curve = r.curves[0];
  ASSERT_EQ(curve.points.size(), 5u);
  EXPECT_EQ(curve.failed_replicates, 0);
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    const CurvePoint& pt = curve.points[k];
    EXPECT_GE(pt.certificate, pt.loss - 1e-12);
    EXPECT_EQ(pt.scaled_loss.size(), c.t_nodes.size());
    EXPECT_LE(pt.loss_band.p05, pt.loss_band.p10);
    EXPECT_LE(pt.loss_band.p10, pt.loss_band.p90);
    EXPECT_LE(pt.loss_band.p90, pt.loss_band.p95);
    if (k > 0) {
      EXPECT_LE(pt.loss, curve.points[k - 1].loss + 1e-12);
      EXPECT_GE(pt.info_native, curve.points[k - 1].info_native - 1e-12);
      EXPECT_LT(pt.control, curve.points[k - 1].control);
    }
  }
  EXPECT_DOUBLE_EQ(curve.points.back().beta_hat, c.anchor);
}

TEST(Experiment, Deterministic) {
  const ExperimentConfig c = Small();
  const ExperimentReport a = RunExperiment(c);
  const ExperimentReport b = RunExperiment(c);
  for (std::size_t k = 0; k < a.curves[0].points.size(); ++k) {
    EXPECT_EQ(a.curves[0].points[k].loss, b.curves[0].points[k].loss);
    EXPECT_EQ(a.curves[0].points[k].info_native_band.p95, b.curves[0].points[k].info_native_band.p95);
  }
}

TEST(Experiment, LearnerBoxAgreesWithRun) {
  const ExperimentConfig c = Small();
  const ExperimentReport r = RunExperiment(c);
  const auto task = RegressionTask::Make(c.n, c.noise_sd);
  auto learner = std::shared_ptr<const Learner>(MakeLearner("kernel_ridge", task, c.lengthscale, c.mlp));
  const auto samples = MonteCarloSamples(c);
  const Codebook cb = PilotCodebook(c);
  LearnerBox box(learner, samples, cb, c.seed);
  EXPECT_EQ(box.base_loss(), CodebookLoss(samples, cb));
  for (const CurvePoint& pt : r.curves[0].points) {
    EXPECT_NEAR(EstimateLoss(box, box.base_loss(), pt.control, 0).value, pt.loss, 1e-12);
    const CertificateEstimate ce = EstimateCertificate(box, box.base_loss(), pt.control, c.t_nodes, 0, 0.0);
    EXPECT_NEAR(ce.value, pt.certificate, 1e-12);
  }
  Matrix bad = box.base_loss();
  bad(0, 0) += 1.0;
  EXPECT_THROW(box.Respond(bad, 1.0, 0), DomainError);
}

TEST(Experiment, ConfigErrors) {
  ExperimentConfig c = Small();
  c.learners = {"svm"};
  EXPECT_THROW(c.Validate(), ConfigError);
  c = Small();
  c.codes = 10000;
  EXPECT_THROW(c.Validate(), ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson(R"({"bogus": 1})", ""), ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson(R"({"n": "ten"})", ""), ConfigError);
  EXPECT_THROW(ExperimentConfigFromJson("{", ""), ConfigError);
  const auto task = RegressionTask::Make(10);
  EXPECT_THROW(MakeLearner("svm", task, 0.2, MlpConfig{}), ConfigError);
}

TEST(Experiment, ConfigFromJson) {
  const ExperimentConfig c = ExperimentConfigFromJson(R"({"mc_samples": 50, "t_nodes": 4, "mlp": {"hidden": 8}})", "");
  EXPECT_EQ(c.mc_samples, 50);
  EXPECT_EQ(c.t_nodes.size(), 4u);
  EXPECT_EQ(c.mlp.hidden, 8u);
  // A scale flag fixes the run size.
  const ExperimentConfig p = ExperimentConfigFromJson(R"({"mc_samples": 50})", "paper");
  EXPECT_EQ(p.mc_samples, ExperimentConfig::Paper().mc_samples);
}

TEST(Experiment, ControlGrids) {
  const ExperimentConfig c = ExperimentConfig::Desk();
  const auto ridge = c.ControlGrid("kernel_ridge");
  ASSERT_EQ(ridge.size(), static_cast<std::size_t>(c.controls));
  EXPECT_DOUBLE_EQ(ridge.front(), c.ridge_max);
  EXPECT_DOUBLE_EQ(ridge.back(), c.ridge_min);
  const auto steps = c.ControlGrid("mlp");
  EXPECT_EQ(steps.front(), c.steps_min);
  EXPECT_EQ(steps.back(), c.steps_max);
}

TEST(Experiment, WritesOutputs) {
  const auto dir = std::filesystem::temp_directory_path() / "brh_experiment_test";
  std::filesystem::remove_all(dir);
  const ExperimentReport r = RunExperiment(Small(), dir.string());
  EXPECT_TRUE(std::filesystem::exists(dir / "curves.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "codebook.csv"));
  const auto j = ParseJson(ReportJson(r), "report");
  EXPECT_TRUE(j.contains("curves"));
  EXPECT_TRUE(j.contains("seeds"));
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace brh
