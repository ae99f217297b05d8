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

#include <gtest/gtest.h>

#include "brh/errors.hpp"
#include "brh/hedge.hpp"
#include "brh/selftest.hpp"
#include "brh/solver.hpp"
#include "test_util.hpp"

namespace brh {
namespace {

using testing::MainGenerators;
using testing::TightConfig;

TEST(Hedge, KlCorrectionVanishes) {
  std::mt19937_64 rng(1);
  const DiscreteProblem p = RandomProblem(4, 3, rng);
  const Channel c = RandomInteriorChannel(p.prior, 3, rng);
  for (double g : MarginalCorrection(Generator::Kl(), p.prior, c)) EXPECT_EQ(g, 0.0);
}

TEST(Hedge, PearsonCorrectionClosedForm) {
  std::mt19937_64 rng(2);
  const DiscreteProblem p = RandomProblem(4, 3, rng);
  const Channel c = RandomInteriorChannel(p.prior, 3, rng);
  const auto g = MarginalCorrection(Generator::PearsonChi2(), p.prior, c);
  for (std::size_t a = 0; a < 3; ++a) {
    double sq = 0.0;
    for (std::size_t s = 0; s < 4; ++s) {
      const double r = c(s, a) / c.marginal()[a];
      sq += p.prior[s] * r * r;
    }
    // f(r) - r f'(r) = 1 - r^2 for the gauged Pearson generator.
    EXPECT_NEAR(g[a], 1.0 - sq, 1e-12);
  }
}

TEST(Hedge, IndependentChannelHasZeroHedge) {
  const DiscreteProblem p = MakeProblem({0.3, 0.7}, {{0, 1, 2}, {1, 0, 2}});
  const std::vector<double> law = {0.2, 0.5, 0.3};
  const Channel c = Channel::Independent(p.prior, law);
  for (const auto& g : MainGenerators()) {
    const PerturbationTable t = OptimalPerturbation(g, p, c, 2.0);
    for (double v : t.values.data()) EXPECT_NEAR(v, 0.0, 1e-14) << g.name();
    EXPECT_NEAR(t.penalty.value(), 0.0, 1e-14);
    EXPECT_NEAR(Certificate(g, p, c, 2.0), ExpectedLoss(p, c), 1e-14);
  }
}

TEST(Hedge, KlPenaltyIsZero) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteProblem p = RandomProblem(3, 4, rng);
    const Channel c = RandomInteriorChannel(p.prior, 4, rng);
    const PerturbationTable t = OptimalPerturbation(Generator::Kl(), p, c, 1.7);
    EXPECT_NEAR(t.penalty.value(), 0.0, 1e-12);
  }
}

TEST(Hedge, HellingerPenaltyInfinitePastDomain) {
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0, 1}, {1, 0}});
  const Channel c(p.prior, Matrix::FromRows({{0.9, 0.1}, {0.1, 0.9}}));
  Matrix values(2, 2, 0.0);
  values(0, 0) = 2.0;  // beta C = 2 >= 1
  EXPECT_TRUE(AdversarialPenalty(Generator::SqHellinger(), p.prior, c, values, 1.0).pos_inf());
}

TEST(Hedge, CertificateIdentity) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteProblem p = RandomProblem(4, 4, rng);
    const Channel c = RandomInteriorChannel(p.prior, 4, rng);
    for (const auto& g : MainGenerators()) {
      for (double beta : {0.3, 1.0, 5.0}) {
        const double want = ExpectedLoss(p, c) + FMutualInformation(g, p.prior, c).value() / beta;
        EXPECT_NEAR(Certificate(g, p, c, beta), want, 1e-10) << g.name();
      }
    }
  }
}

TEST(Hedge, HedgeScalesInverselyWithBeta) {
  std::mt19937_64 rng(5);
  const DiscreteProblem p = RandomProblem(3, 3, rng);
  const Channel c = RandomInteriorChannel(p.prior, 3, rng);
  for (const auto& g : MainGenerators()) {
    const double gap1 = Certificate(g, p, c, 2.0) - ExpectedLoss(p, c);
    const double gap2 = Certificate(g, p, c, 4.0) - ExpectedLoss(p, c);
    EXPECT_NEAR(gap2, 0.5 * gap1, 1e-12);
  }
}

TEST(Hedge, IndifferenceAtOptimum) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteProblem p = RandomProblem(4, 5, rng);
    for (const auto& g : MainGenerators()) {
      const SolveReport r = Solve(g, p, TightConfig(3.0));
      const PerturbationTable t = OptimalPerturbation(g, p, r.channel, 3.0);
      const IndifferenceReport ind = IndifferenceResidual(p, r.channel, t.values);
      EXPECT_LE(ind.max_on_support, 1e-6) << g.name();
      EXPECT_LE(ind.max_off_support, 1e-6) << g.name();
    }
  }
}

TEST(Hedge, IndifferenceFailsAwayFromOptimum) {
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0, 1}, {1, 0}});
  const Channel c(p.prior, Matrix::FromRows({{0.5, 0.5}, {0.5, 0.5}}));
  const PerturbationTable t = OptimalPerturbation(Generator::Kl(), p, c, 1.0);
  const IndifferenceReport ind = IndifferenceResidual(p, c, t.values);
  EXPECT_NEAR(ind.max_on_support, 0.5, 1e-12);
  EXPECT_EQ(ind.support_size[0], 2u);
}

TEST(Hedge, ZeroColumnSlackNonNegativeAtOptimum) {
  // Action 2 is dominated and should stay unused by Pearson.
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0, 1, 5}, {1, 0, 5}});
  const SolveReport r = Solve(Generator::PearsonChi2(), p, TightConfig(4.0));
  ASSERT_EQ(r.channel.marginal()[2], 0.0);
  EXPECT_LE(r.residual_parts.zero_column, 1e-9);
}

TEST(Hedge, GridMatchesSerialAndDiagonalIsCertificate) {
  std::mt19937_64 rng(7);
  const DiscreteProblem p = RandomProblem(4, 4, rng);
  const std::vector<double> betas = {0.5, 1.0, 2.0, 4.0};
  for (const auto& g : MainGenerators()) {
    const Matrix par = EffectiveLossGrid(g, p, betas, betas, TightConfig(1.0));
    const Matrix ser = EffectiveLossGridSerial(g, p, betas, betas, TightConfig(1.0));
    EXPECT_EQ(par, ser);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      const SolveReport r = Solve(g, p, TightConfig(betas[i]));
      EXPECT_NEAR(par(i, i), Certificate(g, p, r.channel, betas[i]), 1e-12);
      // Hedged loss decreases as the adversary weakens.
      for (std::size_t j = 1; j < betas.size(); ++j) EXPECT_LE(par(i, j), par(i, j - 1) + 1e-15);
    }
  }
}

TEST(Hedge, RejectsBadBeta) {
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0, 1}, {1, 0}});
  const Channel c = Channel::Uniform(p.prior, 2);
  EXPECT_THROW(OptimalPerturbation(Generator::Kl(), p, c, 0.0), DomainError);
  EXPECT_THROW(OptimalPerturbation(Generator::Parse("total_variation"), p, c, 1.0), UnsupportedOperation);
}

}  // namespace
}  // namespace brh
