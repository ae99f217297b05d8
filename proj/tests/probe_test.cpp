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
#include <memory>
#include <random>

#include <gtest/gtest.h>

#include "brh/errors.hpp"
#include "brh/hedge.hpp"
#include "brh/numeric.hpp"
#include "brh/probe.hpp"
#include "brh/selftest.hpp"
#include "test_util.hpp"

namespace brh {
namespace {

using testing::MainGenerators;

// Always answers with the same fixed rows.
class ConstantBox : public BlackBox {
 public:
  ConstantBox(std::vector<double> prior, Matrix rows) : prior_(std::move(prior)), rows_(std::move(rows)) {}
  BoxResponse Respond(const Matrix&, double, std::uint64_t) const override {
    BoxResponse r;
    r.rows = rows_;
    return r;
  }
  const std::vector<double>& prior() const override { return prior_; }
  std::size_t num_actions() const override { return rows_.cols(); }

 private:
  std::vector<double> prior_;
  Matrix rows_;
};

DiscreteProblem ThreeByThree() {
  return MakeProblem({0.3, 0.3, 0.4}, {{0, 1, 0.8}, {1, 0, 0.9}, {0.7, 1, 0.1}});
}

TEST(Probe, WhiteBoxLossExact) {
  const DiscreteProblem p = ThreeByThree();
  for (const auto& g : MainGenerators()) {
    SolverBox box(g, p.prior, 3);
    const LossEstimate e = EstimateLoss(box, p.loss, 2.0, 0);
    const SolveReport r = Solve(g, p, testing::TightConfig(2.0));
    EXPECT_NEAR(e.value, ExpectedLoss(p, r.channel), 1e-12);
    EXPECT_EQ(e.observation.n_samples, 0u);
  }
}

TEST(Probe, SampledLossWithinThreeStandardErrors) {
  const DiscreteProblem p = ThreeByThree();
  auto exact = std::make_shared<SolverBox>(Generator::Kl(), p.prior, 3);
  const double truth = EstimateLoss(*exact, p.loss, 2.0, 0).value;
  SampledBox box(exact, 20000);
  const Channel c(p.prior, *exact->Respond(p.loss, 2.0, 0).rows);
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const LossEstimate e = EstimateLoss(box, p.loss, 2.0, seed);
    EXPECT_EQ(e.observation.n_samples, 20000u);
    // About P(s) N draws land on stimulus s.
    double var = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
      double m1 = 0.0;
      double m2 = 0.0;
      for (std::size_t a = 0; a < 3; ++a) {
        m1 += c(s, a) * p.loss(s, a);
        m2 += c(s, a) * p.loss(s, a) * p.loss(s, a);
      }
      var += p.prior[s] * (m2 - m1 * m1) / 20000.0;
    }
    inside += std::abs(e.value - truth) <= 3.0 * std::sqrt(var);
  }
  EXPECT_GE(inside, 18);
}

TEST(Probe, SampledBoxCommonRandomNumbers) {
  const DiscreteProblem p = ThreeByThree();
  auto exact = std::make_shared<SolverBox>(Generator::Kl(), p.prior, 3);
  SampledBox box(exact, 1000);
  const BoxResponse a = box.Respond(p.loss, 2.0, 7);
  const BoxResponse b = box.Respond(p.loss, 2.0, 7);
  ASSERT_TRUE(a.counts && b.counts);
  EXPECT_EQ(*a.counts, *b.counts);
  const BoxResponse c = box.Respond(p.loss, 2.0, 8);
  EXPECT_FALSE(*a.counts == *c.counts);
  EXPECT_THROW(SampledBox(exact, 0), ConfigError);
}

TEST(Probe, ConstantLossCertificate) {
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0.4, 0.4}, {0.4, 0.4}});
  SolverBox box(Generator::Kl(), p.prior, 2);
  const CertificateEstimate ce = EstimateCertificate(box, p.loss, 3.0, UniformNodes(8), 0, 1e-9);
  EXPECT_NEAR(ce.value, 0.4, 1e-12);
}

TEST(Probe, TrapezoidExactOnAffine) {
  // A fixed response makes L(t) constant in t; with a constant box the
  // trapezoid returns L exactly.
  const std::vector<double> prior = {0.5, 0.5};
  ConstantBox box(prior, Matrix::FromRows({{0.2, 0.8}, {0.6, 0.4}}));
  const Matrix loss = Matrix::FromRows({{0, 1}, {1, 0}});
  const CertificateEstimate ce = EstimateCertificate(box, loss, 1.0, UniformNodes(3), 0);
  EXPECT_NEAR(ce.value, 0.5 * (0.8 + 0.6), 1e-15);
}

TEST(Probe, CertificateConvergesWithNodes) {
  const DiscreteProblem p = ThreeByThree();
  for (const auto& g : MainGenerators()) {
    SolverBox box(g, p.prior, 3);
    const SolveReport r = Solve(g, p, testing::TightConfig(1.0));
    const double want = Certificate(g, p, r.channel, 1.0);
    const double e9 = std::abs(EstimateCertificate(box, p.loss, 1.0, UniformNodes(8), 0, 1e-9).value - want);
    const double e65 = std::abs(EstimateCertificate(box, p.loss, 1.0, UniformNodes(64), 0, 1e-9).value - want);
    EXPECT_LE(e9, 1e-3) << g.name();
    EXPECT_LE(e65, 1e-5) << g.name();
  }
}

TEST(Probe, NodeValidation) {
  const DiscreteProblem p = ThreeByThree();
  SolverBox box(Generator::Kl(), p.prior, 3);
  const std::vector<double> bad = {0.0, 0.5};
  EXPECT_THROW(EstimateCertificate(box, p.loss, 1.0, bad, 0), ConfigError);
  EXPECT_THROW(UniformNodes(0), ConfigError);
  EXPECT_THROW(EstimateLoss(box, Matrix(2, 2), 1.0, 0), DomainError);
}

TEST(Probe, PathRecoveryKl) {
  const DiscreteProblem p = ThreeByThree();
  SolverBox box(Generator::Kl(), p.prior, 3);
  ProbeConfig cfg;
  cfg.controls = GeometricGrid(2.0, 8.0, 10);
  cfg.anchor = 8.0;
  const auto recs = RunProbe(box, p.loss, cfg);
  for (const auto& r : recs) {
    EXPECT_NEAR(r.beta_hat / r.control, 1.0, 0.02);
    const double info = FMutualInformation(Generator::Kl(), p.prior, r.channel).value();
    EXPECT_NEAR(r.info_hat / info, 1.0, 0.02);
  }
}

TEST(Probe, PathRecoveryErrors) {
  std::vector<ProbeRecord> recs(3);
  for (std::size_t k = 0; k < 3; ++k) {
    recs[k].control = 1.0 + k;
    recs[k].loss_hat = 0.5 - 0.1 * k;
  }
  recs[0].certificate_hat = 0.5;
  recs[1].certificate_hat = 0.45;
  recs[2].certificate_hat = 0.5;
  RecoverPath(recs, 3.0, PathRule::kTrapezoid);
  EXPECT_EQ(recs[0].beta_hat, 0.0);
  EXPECT_EQ(recs[0].info_hat, 0.0);
  EXPECT_DOUBLE_EQ(recs[2].beta_hat, 3.0);
  EXPECT_NEAR(recs[2].info_hat, 3.0 * 0.2, 1e-12);
  // Gap 0.05 -> 0.2 while L_adv rises by 0.05: log beta falls by 0.05 * (1/0.05 + 1/0.2) / 2.
  EXPECT_NEAR(std::log(recs[2].beta_hat / recs[1].beta_hat), -0.625, 1e-12);
  EXPECT_THROW(RecoverPath(recs, -1.0), ConfigError);
  // Log-mean rule: log beta falls by 0.05 * log(0.2 / 0.05) / (0.2 - 0.05).
  RecoverPath(recs, 3.0, PathRule::kLogMean);
  EXPECT_NEAR(std::log(recs[2].beta_hat / recs[1].beta_hat), -0.05 * std::log(4.0) / 0.15, 1e-12);

  std::vector<ProbeRecord> flat = recs;
  for (auto& r : flat) r.certificate_hat = r.loss_hat;
  EXPECT_THROW(RecoverPath(flat), DomainError);
  std::vector<ProbeRecord> closing = recs;
  closing[2].certificate_hat = 0.3;
  EXPECT_THROW(RecoverPath(closing), DomainError);
  std::vector<ProbeRecord> unsorted = recs;
  unsorted[1].control = unsorted[0].control;
  EXPECT_THROW(RecoverPath(unsorted), DomainError);
  std::vector<ProbeRecord> single(recs.begin(), recs.begin() + 1);
  EXPECT_THROW(RecoverPath(single), DomainError);
}

TEST(Probe, LocalHedgeMatchesKlHedge) {
  const DiscreteProblem p = ThreeByThree();
  SolverBox box(Generator::Kl(), p.prior, 3);
  ProbeConfig cfg;
  cfg.controls = GeometricGrid(2.0, 8.0, 10);
  cfg.anchor = 8.0;
  cfg.t_nodes = UniformNodes(64);
  const auto recs = RunProbe(box, p.loss, cfg);
  const ProbeRecord& r = recs.back();
  const LocalHedge h = RecoverLocalHedge(box, p.loss, r, {});
  const PerturbationTable t = OptimalPerturbation(Generator::Kl(), p, r.channel, r.control);
  // On the support the recovered hedge equals C^opt up to the per-stimulus
  // constant; for KL the constant is shared, so differences match.
  double aggregate = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t a = 0; a < 3; ++a) {
      if (!h.support[s][a]) continue;
      aggregate += p.prior[s] * r.channel(s, a) * h.hedge(s, a);
      for (std::size_t b = 0; b < 3; ++b) {
        if (!h.support[s][b]) continue;
        EXPECT_NEAR(h.hedge(s, a) - h.hedge(s, b), t.values(s, a) - t.values(s, b), 1e-6);
      }
    }
  }
  EXPECT_NEAR(aggregate, h.gap, 1e-6);
  EXPECT_EQ(h.directions.size(), 9u);
}

TEST(Probe, IndependentBoxHasNoInformation) {
  const std::vector<double> prior = {0.5, 0.5};
  ConstantBox box(prior, Matrix::FromRows({{0.3, 0.7}, {0.3, 0.7}}));
  const Matrix loss = Matrix::FromRows({{0, 1}, {1, 0}});
  ProbeConfig cfg;
  cfg.controls = {1.0, 2.0};
  // Zero gap everywhere: nothing to recover.
  EXPECT_THROW(RunProbe(box, loss, cfg), DomainError);
}

TEST(Probe, FitGeneratorRanksTruthFirst) {
  const DiscreteProblem p = ThreeByThree();
  for (const auto& truth : MainGenerators()) {
    SolverBox box(truth, p.prior, 3);
    ProbeConfig cfg;
    const double bc = testing::CriticalBeta(truth, p.prior, p.loss);
    ASSERT_GT(bc, 0.0);
    cfg.controls = GeometricGrid(4 * bc, 64 * bc, 5);
    const auto recs = RunProbe(box, p.loss, cfg);
    std::vector<LocalHedge> hedges;
    LocalHedgeConfig hc;
    hc.epsilon = 0.05;
    for (const auto& r : recs) hedges.push_back(RecoverLocalHedge(box, p.loss, r, hc));
    const auto cands = MainGenerators();
    const FitResult fit = FitGenerator(recs, hedges, p.loss, p.prior, cands);
    ASSERT_EQ(fit.ranking.size(), 3u);
    EXPECT_EQ(fit.ranking[0].generator, truth.name());
  }
}

TEST(Probe, ImpliedChannelReproducesSolution) {
  const DiscreteProblem p = ThreeByThree();
  for (const auto& g : MainGenerators()) {
    const SolveReport r = Solve(g, p, testing::TightConfig(3.0));
    const Matrix implied = ImpliedChannel(g, p.prior, r.channel, p.loss, 3.0);
    EXPECT_LE(MaxRowTotalVariation(implied, r.channel.rows()), 1e-8) << g.name();
  }
}

#ifdef BRH_FAKE_BOX
TEST(Probe, SubprocessRows) {
  const DiscreteProblem p = ThreeByThree();
  SubprocessBox box({BRH_FAKE_BOX, "gibbs"}, p.prior, 3);
  const Observation o = Observe(box, p.loss, 2.0, 1);
  double z = 0.0;
  for (std::size_t a = 0; a < 3; ++a) z += std::exp(-2.0 * p.loss(0, a));
  EXPECT_NEAR(o.channel(0, 0), 1.0 / z, 1e-12);
  // Second request on the same pipe.
  EXPECT_NO_THROW(Observe(box, p.loss, 3.0, 2));
}

TEST(Probe, SubprocessSamples) {
  const DiscreteProblem p = ThreeByThree();
  SubprocessBox box({BRH_FAKE_BOX, "samples"}, p.prior, 3);
  const Observation o = Observe(box, p.loss, 2.0, 1);
  EXPECT_EQ(o.n_samples, 12u);
  EXPECT_NEAR(o.channel(1, 1), 0.75, 1e-15);
  EXPECT_NEAR(o.channel(1, 0), 0.25, 1e-15);
}

TEST(Probe, SubprocessFailures) {
  const DiscreteProblem p = ThreeByThree();
  SubprocessBox garbage({BRH_FAKE_BOX, "garbage"}, p.prior, 3);
  EXPECT_THROW(Observe(garbage, p.loss, 2.0, 1), NumericFailure);
  SubprocessBox error({BRH_FAKE_BOX, "error"}, p.prior, 3);
  EXPECT_THROW(Observe(error, p.loss, 2.0, 1), NumericFailure);
  SubprocessBox missing({"/nonexistent/box"}, p.prior, 3);
  EXPECT_THROW(Observe(missing, p.loss, 2.0, 1), NumericFailure);
}
#endif

}  // namespace
}  // namespace brh
