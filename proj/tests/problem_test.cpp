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
#include "brh/problem.hpp"
#include "test_util.hpp"

namespace brh {
namespace {

TEST(Problem, Validation) {
  EXPECT_THROW(MakeProblem({0.5, 0.6}, {{0, 1}, {1, 0}}), DomainError);
  EXPECT_THROW(MakeProblem({0.5, 0.5}, {{0, 1}}), DomainError);
  EXPECT_THROW(MakeProblem({0.5, 0.5}, {{0, NAN}, {1, 0}}), DomainError);
  EXPECT_NO_THROW(MakeProblem({1.0, 0.0}, {{0, 1}, {1, 0}}));
}

TEST(Problem, InducedMarginal) {
  const std::vector<double> uni = {0.5, 0.5};
  auto m = InducedMarginal(uni, Matrix::FromRows({{1, 0}, {0, 1}}));
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  m = InducedMarginal(std::vector<double>{1.0, 0.0}, Matrix::FromRows({{0.3, 0.7}, {0.9, 0.1}}));
  EXPECT_DOUBLE_EQ(m[0], 0.3);
  EXPECT_DOUBLE_EQ(m[1], 0.7);
  m = InducedMarginal(uni, Matrix::FromRows({{0.75, 0.25}, {0.25, 0.75}}));
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_THROW(InducedMarginal(uni, Matrix(3, 2, 0.5)), DomainError);
}

TEST(Problem, ChannelRejectsBadRows) {
  const std::vector<double> uni = {0.5, 0.5};
  EXPECT_THROW(Channel(uni, Matrix::FromRows({{0.5, 0.6}, {0.5, 0.5}})), DomainError);
  EXPECT_THROW(Channel(uni, Matrix::FromRows({{1.5, -0.5}, {0.5, 0.5}})), DomainError);
}

TEST(Problem, ExpectedLoss) {
  std::mt19937_64 rng(3);
  const DiscreteProblem p = RandomProblem(3, 3, rng);
  const Channel ch = RandomInteriorChannel(p.prior, 3, rng);
  EXPECT_NEAR(ExpectedLoss(p, ch), testing::BruteExpectedLoss(p, ch.rows()), 1e-15);
  Matrix argmin(3, 3, 0.0);
  double oracle = 0.0;
  for (std::size_t s = 0; s < 3; ++s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < 3; ++a) {
      if (p.loss(s, a) < p.loss(s, best)) best = a;
    }
    argmin(s, best) = 1.0;
    oracle += p.prior[s] * p.loss(s, best);
  }
  EXPECT_NEAR(ExpectedLoss(p, Channel(p.prior, argmin)), oracle, 1e-15);
  const DiscreteProblem c = MakeProblem(p.prior, {{2, 2, 2}, {2, 2, 2}, {2, 2, 2}});
  EXPECT_NEAR(ExpectedLoss(c, ch), 2.0, 1e-15);
}

TEST(Problem, MutualInformationClosedForms) {
  const std::vector<double> uni = {0.5, 0.5};
  const Channel ch(uni, Matrix::FromRows({{0.75, 0.25}, {0.25, 0.75}}));
  EXPECT_NEAR(FMutualInformation(Generator::Kl(), uni, ch).value(),
              0.75 * std::log(1.5) + 0.25 * std::log(0.5), 1e-15);
  // Pearson: sum P(s) P(a) (r - 1)^2.
  double oracle = 0.0;
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) oracle += 0.5 * 0.5 * std::pow(ch(s, a) / 0.5 - 1.0, 2);
  }
  EXPECT_NEAR(FMutualInformation(Generator::PearsonChi2(), uni, ch).value(), oracle, 1e-15);
  const Channel ind = Channel::Independent(uni, std::vector<double>{0.3, 0.7});
  for (const auto& g : testing::MainGenerators()) EXPECT_NEAR(FMutualInformation(g, uni, ind).value(), 0.0, 1e-15);
}

TEST(Problem, Divergence) {
  const std::vector<double> p = {0.5, 0.5};
  for (const auto& g : testing::MainGenerators()) EXPECT_NEAR(Divergence(g, p, p).value(), 0.0, 1e-15);
  EXPECT_NEAR(Divergence(Generator::Kl(), std::vector<double>{1.0, 0.0}, p).value(), std::log(2.0), 1e-15);
  EXPECT_NEAR(Divergence(Generator::Parse("total_variation"), std::vector<double>{0.8, 0.2}, p).value(), 0.3, 1e-15);
  EXPECT_TRUE(Divergence(Generator::Kl(), p, std::vector<double>{1.0, 0.0}).pos_inf());
}

TEST(Problem, InformationProperties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    const DiscreteProblem p = RandomProblem(4, 3, rng);
    const Channel q1 = RandomInteriorChannel(p.prior, 3, rng);
    const Channel q2 = RandomInteriorChannel(p.prior, 3, rng);
    const double lam = u(rng);
    Matrix mix(4, 3);
    for (std::size_t i = 0; i < mix.data().size(); ++i) {
      mix.data()[i] = lam * q1.rows().data()[i] + (1 - lam) * q2.rows().data()[i];
    }
    const Channel qm(p.prior, mix);
    for (const auto& g : testing::MainGenerators()) {
      const double i1 = FMutualInformation(g, p.prior, q1).value();
      const double i2 = FMutualInformation(g, p.prior, q2).value();
      EXPECT_GE(i1, 0.0);
      EXPECT_LE(FMutualInformation(g, p.prior, qm).value(), lam * i1 + (1 - lam) * i2 + 1e-10);
      // Binary coarsening of the joint versus the product law.
      const auto& m = q1.marginal();
      double pe = 0.0;
      double qe = 0.0;
      for (std::size_t s = 0; s < 4; ++s) {
        for (std::size_t a = 0; a < 3; ++a) {
          if ((s + a) % 2 == 0) {
            pe += p.prior[s] * q1(s, a);
            qe += p.prior[s] * m[a];
          }
        }
      }
      const double bin = Divergence(g, std::vector<double>{pe, 1 - pe}, std::vector<double>{qe, 1 - qe}).value();
      EXPECT_LE(bin, i1 + 1e-12) << g.name();
    }
  }
}

TEST(Problem, FreeEnergyRecomposition) {
  std::mt19937_64 rng(5);
  const DiscreteProblem p = RandomProblem(3, 4, rng);
  const Channel ch = RandomInteriorChannel(p.prior, 4, rng);
  for (const auto& g : testing::MainGenerators()) {
    EXPECT_NEAR(FreeEnergy(g, p, ch, 2.5).value(),
                testing::BruteExpectedLoss(p, ch.rows()) + RawInformation(g, p.prior, ch.rows()) / 2.5, 1e-13);
  }
}

}  // namespace
}  // namespace brh
