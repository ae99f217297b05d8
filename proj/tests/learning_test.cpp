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
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "brh/errors.hpp"
#include "brh/hedge.hpp"
#include "brh/learning.hpp"
#include "brh/selftest.hpp"
#include "test_util.hpp"

namespace brh {
namespace {

TEST(Regression, TaskShape) {
  const RegressionTask t = RegressionTask::Make(5, 0.1);
  ASSERT_EQ(t.n(), 5u);
  EXPECT_EQ(t.design.front(), -1.0);
  EXPECT_EQ(t.design.back(), 1.0);
  EXPECT_NEAR(RegressionTask::Mean(0.5), 0.8 + 0.125, 1e-15);
  EXPECT_THROW(RegressionTask::Make(1), ConfigError);
  EXPECT_THROW(RegressionTask::Make(10, -1.0), ConfigError);
  EXPECT_EQ(SampleTask(t, 3), SampleTask(t, 3));
  EXPECT_NE(SampleTask(t, 3), SampleTask(t, 4));
}

TEST(KernelRidge, MatchesDirectSolve) {
  const RegressionTask t = RegressionTask::Make(40);
  const std::vector<double> y = SampleTask(t, 1);
  const double ls = 0.22;
  for (double ridge : {1e-3, 0.1, 10.0}) {
    const std::vector<double> f = KernelRidgeFit(t, y, ls, ridge);
    Eigen::MatrixXd k(40, 40);
    for (int i = 0; i < 40; ++i) {
      for (int j = 0; j < 40; ++j) {
        const double d = t.design[i] - t.design[j];
        k(i, j) = std::exp(-d * d / (2 * ls * ls));
      }
    }
    const Eigen::VectorXd yy = Eigen::Map<const Eigen::VectorXd>(y.data(), 40);
    const Eigen::MatrixXd a = k + 40 * ridge * Eigen::MatrixXd::Identity(40, 40);
    const Eigen::VectorXd want = k * a.ldlt().solve(yy);
    for (int i = 0; i < 40; ++i) EXPECT_NEAR(f[i], want[i], 1e-8);
  }
}

TEST(KernelRidge, Limits) {
  const RegressionTask t = RegressionTask::Make(30);
  const std::vector<double> y = SampleTask(t, 2);
  for (double v : KernelRidgeFit(t, y, 0.22, 1e12)) EXPECT_NEAR(v, 0.0, 1e-10);
  const std::vector<double> f = KernelRidgeFit(t, y, 0.05, 1e-10);
  EXPECT_LT(MeanSquaredError(f, y), 1e-4);
  EXPECT_THROW(KernelRidgeFit(t, y, 0.22, 0.0), DomainError);
}

TEST(Mlp, FlattenRoundTrip) {
  const MlpParams p = InitMlp(5, 9);
  const MlpParams q = MlpParams::Unflatten(p.Flatten(), 5);
  EXPECT_EQ(p.Flatten(), q.Flatten());
  EXPECT_EQ(p.size(), 16u);
}

TEST(Mlp, GradientMatchesFiniteDifference) {
  const RegressionTask t = RegressionTask::Make(12);
  const std::vector<double> y = SampleTask(t, 5);
  const MlpParams p = InitMlp(6, 11);
  std::vector<double> grad;
  MlpLossAndGradient(p, t.design, y, 0.7, grad);
  std::vector<double> flat = p.Flatten();
  std::vector<double> scratch;
  const double h = 1e-6;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    std::vector<double> up = flat;
    std::vector<double> dn = flat;
    up[i] += h;
    dn[i] -= h;
    const double fd = (MlpLossAndGradient(MlpParams::Unflatten(up, 6), t.design, y, 0.7, scratch) -
                       MlpLossAndGradient(MlpParams::Unflatten(dn, 6), t.design, y, 0.7, scratch)) /
                      (2 * h);
    EXPECT_NEAR(grad[i], fd, 1e-4 * std::max(1.0, std::abs(fd))) << "param " << i;
  }
}

TEST(Mlp, TrainingReducesLoss) {
  const RegressionTask t = RegressionTask::Make(50);
  const std::vector<double> y = SampleTask(t, 6);
  MlpConfig cfg;
  cfg.lr = 1e-2;
  const std::vector<int> checkpoints = {0, 100, 1000};
  const auto preds = MlpFit(t, y, cfg, checkpoints, 3);
  ASSERT_EQ(preds.size(), 3u);
  EXPECT_EQ(preds[0], MlpPredict(InitMlp(cfg.hidden, 3), t.design));
  EXPECT_LT(MeanSquaredError(preds[2], y), MeanSquaredError(preds[1], y));
  EXPECT_LT(MeanSquaredError(preds[1], y), MeanSquaredError(preds[0], y));
  const std::vector<int> bad = {10, 5};
  EXPECT_THROW(MlpFit(t, y, cfg, bad, 3), ConfigError);
  // Zero loss scale leaves the initial network.
  const auto frozen = MlpFit(t, y, cfg, checkpoints, 3, 0.0);
  EXPECT_EQ(frozen[2], preds[0]);
}

TEST(Codebook, DistinctPilotsBecomeCodes) {
  const std::vector<std::vector<double>> pilots = {{0, 0}, {1, 0}, {0, 1}, {5, 5}};
  const Codebook cb = BuildCodebook(pilots, 4, 1);
  ASSERT_EQ(cb.codes.size(), 4u);
  for (const auto& p : pilots) {
    bool found = false;
    for (const auto& c : cb.codes) found = found || c == p;
    EXPECT_TRUE(found);
  }
}

TEST(Codebook, PlantedClustersAndMonotoneObjective) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 0.05);
  const std::vector<std::vector<double>> centers = {{0, 0, 0}, {3, 0, 0}, {0, 3, 0}};
  std::vector<std::vector<double>> pilots;
  for (int i = 0; i < 60; ++i) {
    std::vector<double> p = centers[i % 3];
    for (double& v : p) v += noise(rng);
    pilots.push_back(p);
  }
  const Codebook cb = BuildCodebook(pilots, 3, 2);
  for (std::size_t i = 1; i < cb.objective_trace.size(); ++i) {
    EXPECT_LE(cb.objective_trace[i], cb.objective_trace[i - 1] + 1e-12);
  }
  for (const auto& c : centers) {
    double best = 1e300;
    for (const auto& code : cb.codes) {
      double d = 0.0;
      for (int j = 0; j < 3; ++j) d += (code[j] - c[j]) * (code[j] - c[j]);
      best = std::min(best, d);
    }
    EXPECT_LT(std::sqrt(best), 0.05);
  }
  EXPECT_NEAR(cb.temperature, MedianPairwiseDistance(cb.codes) / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(BuildCodebook(pilots, 1, 2), ConfigError);
  EXPECT_THROW(BuildCodebook({{0.0}}, 2, 2), ConfigError);
}

TEST(Codebook, SoftAssign) {
  Codebook cb;
  cb.codes = {{0.0}, {1.0}};
  cb.temperature = 1.0;
  const std::vector<double> mid = {0.5};
  auto w = SoftAssign(mid, cb);
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  const std::vector<double> x = {0.0};
  w = SoftAssign(x, cb);
  EXPECT_NEAR(w[0], 1.0 / (1.0 + std::exp(-0.5)), 1e-15);
  cb.temperature = 1e-200;
  w = SoftAssign(x, cb);
  EXPECT_EQ(w[0], 1.0);
  const std::vector<double> two = {0.0, 1.0};
  EXPECT_THROW(SoftAssign(two, cb), DomainError);
}

TEST(SampleHedging, DecompositionExact) {
  const RegressionTask t = RegressionTask::Make(20);
  const std::vector<double> y = SampleTask(t, 8);
  const std::vector<double> a = SampleTask(t, 9);
  EXPECT_NEAR(PopulationLoss(a, t), MeanSquaredError(a, y) + SampleDistortion(a, y, t), 1e-12);
}

// Antithetic sign vectors: the sample distortion of every action is centered
// exactly under the uniform law over these samples.
std::vector<std::vector<double>> AntitheticSamples(const RegressionTask& t, int pairs, std::mt19937_64& rng) {
  std::vector<std::vector<double>> out;
  const std::vector<double> mean = t.MeanVector();
  for (int k = 0; k < pairs; ++k) {
    std::vector<double> plus(mean);
    std::vector<double> minus(mean);
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double e = (rng() & 1) ? t.noise_sd : -t.noise_sd;
      plus[i] += e;
      minus[i] -= e;
    }
    out.push_back(plus);
    out.push_back(minus);
  }
  return out;
}

TEST(SampleHedging, ReweightingIdentity) {
  std::mt19937_64 rng(10);
  const RegressionTask t = RegressionTask::Make(15);
  const auto samples = AntitheticSamples(t, 3, rng);
  std::vector<std::vector<double>> actions;
  for (int a = 0; a < 4; ++a) actions.push_back(SampleTask(t, 100 + a));
  const std::vector<double> prior(samples.size(), 1.0 / samples.size());
  Matrix dist(samples.size(), actions.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t a = 0; a < actions.size(); ++a) dist(s, a) = SampleDistortion(actions[a], samples[s], t);
  }
  for (int trial = 0; trial < 5; ++trial) {
    const Channel c = RandomInteriorChannel(prior, actions.size(), rng);
    const ReweightingGap g = ComputeReweightingGap(prior, c, dist);
    EXPECT_NEAR(g.difference, 0.0, 1e-10);
    EXPECT_NEAR(g.channel_weighted, g.product_form, 1e-10);
    // Population loss of the channel = training loss + channel-weighted distortion.
    double pop = 0.0;
    double train = 0.0;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      for (std::size_t a = 0; a < actions.size(); ++a) {
        const double w = prior[s] * c(s, a);
        pop += w * PopulationLoss(actions[a], t);
        train += w * MeanSquaredError(actions[a], samples[s]);
      }
    }
    EXPECT_NEAR(pop, train + g.channel_weighted, 1e-10);
  }
}

TEST(SampleHedging, MonteCarloCentering) {
  const RegressionTask t = RegressionTask::Make(30);
  const std::vector<double> action = SampleTask(t, 77);
  const int n = 10000;
  double sum = 0.0;
  double sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double c = SampleDistortion(action, SampleTask(t, 1000 + k), t);
    sum += c;
    sq += c * c;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean), 3 * se);
}

TEST(SampleHedging, MarginIdentityAndScaling) {
  std::mt19937_64 rng(12);
  const DiscreteProblem p = RandomProblem(4, 3, rng);
  const Channel c = RandomInteriorChannel(p.prior, 3, rng);
  const Matrix zero(4, 3, 0.0);
  for (const auto& g : testing::MainGenerators()) {
    const double beta = 0.5;
    const double n = 40;
    const double info = FMutualInformation(g, p.prior, c).value();
    const double margin = CertificateMargin(g, p.prior, c, beta, n, zero);
    EXPECT_NEAR(margin, info / (beta * n), 1e-12) << g.name();
    EXPECT_NEAR(CertificateMargin(g, p.prior, c, beta, 2 * n, zero), 0.5 * margin, 1e-12);
    // Subtracting a distortion shifts the margin by its channel average.
    Matrix d(4, 3, 0.01);
    EXPECT_NEAR(CertificateMargin(g, p.prior, c, beta, n, d), margin - 0.01, 1e-12);
  }
}

}  // namespace
}  // namespace brh
