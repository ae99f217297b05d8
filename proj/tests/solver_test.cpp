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
#include "brh/solver.hpp"
#include "test_util.hpp"

namespace brh {
namespace {

using testing::MainGenerators;
using testing::TightConfig;

// Minimum of L + I_f / beta over a grid of 2x2 row parameters.
double GridMinimum2x2(const Generator& g, const DiscreteProblem& p, double beta, int grid) {
  double best = 1e300;
  Matrix rows(2, 2);
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      rows(0, 0) = static_cast<double>(i) / grid;
      rows(0, 1) = 1.0 - rows(0, 0);
      rows(1, 0) = static_cast<double>(j) / grid;
      rows(1, 1) = 1.0 - rows(1, 0);
      best = std::min(best, testing::BruteExpectedLoss(p, rows) + RawInformation(g, p.prior, rows) / beta);
    }
  }
  return best;
}

TEST(Solver, KlMatchesBlahutArimoto) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteProblem p = RandomProblem(4, 4, rng);
    for (double beta : {0.5, 3.0, 12.0}) {
      SolveConfig ba = TightConfig(beta);
      ba.tol = 1e-12;
      const SolveReport a = SolveKl(p, ba);
      const SolveReport b = SolveF(Generator::Kl(), p, TightConfig(beta));
      ASSERT_TRUE(b.converged);
      EXPECT_LE(MaxRowTotalVariation(a.channel.rows(), b.channel.rows()), 1e-6);
      EXPECT_LE(b.free_energy, a.free_energy + 1e-12);
    }
  }
}

TEST(Solver, BetaLimits) {
  std::mt19937_64 rng(2);
  const DiscreteProblem p = RandomProblem(3, 3, rng);
  const SolveReport small = Solve(Generator::Kl(), p, TightConfig(1e-6));
  EXPECT_LT(FMutualInformation(Generator::Kl(), p.prior, small.channel).value(), 1e-6);
  const DiscreteProblem sep = MakeProblem({0.3, 0.3, 0.4}, {{0, 1, 1}, {1, 0, 1}, {1, 1, 0}});
  const SolveReport big = Solve(Generator::Kl(), sep, TightConfig(1e3));
  Matrix argmin(3, 3, 0.0);
  for (int s = 0; s < 3; ++s) argmin(s, s) = 1.0;
  EXPECT_LE(MaxRowTotalVariation(big.channel.rows(), argmin), 1e-3);
}

TEST(Solver, ConstantLossGivesIndependentChannel) {
  const DiscreteProblem p = MakeProblem({0.2, 0.8}, {{1, 1, 1}, {1, 1, 1}});
  for (const auto& g : MainGenerators()) {
    const SolveReport r = Solve(g, p, TightConfig(2.0));
    EXPECT_NEAR(FMutualInformation(g, p.prior, r.channel).value(), 0.0, 1e-12) << g.name();
  }
}

TEST(Solver, GridOptimality2x2) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    const DiscreteProblem p = RandomProblem(2, 2, rng);
    for (const auto& g : MainGenerators()) {
      const double beta = 4.0;
      const SolveReport r = Solve(g, p, TightConfig(beta));
      EXPECT_LE(r.free_energy, GridMinimum2x2(g, p, beta, 1000) + 1e-5) << g.name();
    }
  }
}

TEST(Solver, MonotoneDescentTrace) {
  std::mt19937_64 rng(4);
  const DiscreteProblem p = RandomProblem(5, 4, rng);
  for (const auto& g : MainGenerators()) {
    SolveConfig c = TightConfig(3.0);
    c.record_trace = true;
    const SolveReport r = SolveF(g, p, c);
    ASSERT_GE(r.free_energy_trace.size(), 1u);
    for (std::size_t i = 1; i < r.free_energy_trace.size(); ++i) {
      EXPECT_LE(r.free_energy_trace[i], r.free_energy_trace[i - 1] + 1e-12) << g.name() << " step " << i;
    }
  }
}

TEST(Solver, ConvergedImpliesResidual) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const DiscreteProblem p = RandomProblem(4, 5, rng);
    for (const auto& g : MainGenerators()) {
      const SolveReport r = Solve(g, p, TightConfig(2.0));
      if (r.converged) {
        EXPECT_LE(r.residual, 1e-11);
      }
      const SolveResidual res = ChannelResidual(g, p, r.channel, 2.0);
      EXPECT_LE(res.total(), 1e-6) << g.name();
    }
  }
}

TEST(Solver, InitRulesAgree) {
  std::mt19937_64 rng(10);
  const DiscreteProblem p = RandomProblem(4, 4, rng);
  for (const auto& g : MainGenerators()) {
    SolveConfig a = TightConfig(2.0);
    SolveConfig b = a;
    b.init = InitRule::kMarginalSeed;
    const SolveReport ra = Solve(g, p, a);
    const SolveReport rb = Solve(g, p, b);
    EXPECT_NEAR(ra.free_energy, rb.free_energy, 1e-10);
    SolveConfig w = TightConfig(2.2);
    w.init = InitRule::kWarmStart;
    w.warm_start = ra.channel;
    EXPECT_TRUE(Solve(g, p, w).converged);
  }
}

TEST(Solver, BetaSweepMonotone) {
  std::mt19937_64 rng(12);
  const DiscreteProblem p = RandomProblem(4, 4, rng);
  for (const auto& g : MainGenerators()) {
    double prev_info = -1.0;
    double prev_loss = 1e300;
    for (double beta = 0.25; beta < 70; beta *= 1.5) {
      const SolveReport r = Solve(g, p, TightConfig(beta));
      const double info = FMutualInformation(g, p.prior, r.channel).value();
      const double loss = ExpectedLoss(p, r.channel);
      EXPECT_GE(info, prev_info - 1e-8) << g.name() << " beta " << beta;
      EXPECT_LE(loss, prev_loss + 1e-8) << g.name() << " beta " << beta;
      prev_info = info;
      prev_loss = loss;
    }
  }
}

TEST(Solver, ZeroPriorStimulusGetsMarginal) {
  const DiscreteProblem p = MakeProblem({0.5, 0.0, 0.5}, {{0, 1}, {0.3, 0.2}, {1, 0}});
  const SolveReport r = Solve(Generator::PearsonChi2(), p, TightConfig(2.0));
  for (std::size_t a = 0; a < 2; ++a) EXPECT_NEAR(r.channel(1, a), r.channel.marginal()[a], 1e-15);
}

TEST(Solver, PearsonReachesExactZeros) {
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0, 1, 0.5}, {1, 0, 0.5}});
  const SolveReport r = Solve(Generator::PearsonChi2(), p, TightConfig(20.0));
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.channel(0, 1), 0.0);
  const SolveReport h = Solve(Generator::SqHellinger(), p, TightConfig(20.0));
  EXPECT_GT(h.channel(0, 1), 0.0);
}

TEST(Solver, ProjectedGradientAgrees) {
  const DiscreteProblem p = MakeProblem({0.4, 0.6}, {{0, 1, 0.4}, {1, 0.1, 0.6}});
  SolveConfig c = TightConfig(2.0);
  c.tol = 1e-8;
  const SolveReport a = Solve(Generator::PearsonChi2(), p, c);
  c.method = SolveMethod::kProjectedGradient;
  const SolveReport b = Solve(Generator::PearsonChi2(), p, c);
  EXPECT_NEAR(a.free_energy, b.free_energy, 1e-7);
}

TEST(Solver, NonSmoothRejected) {
  const DiscreteProblem p = MakeProblem({0.5, 0.5}, {{0, 1}, {1, 0}});
  EXPECT_THROW(Solve(Generator::Parse("total_variation"), p, TightConfig(1.0)), UnsupportedOperation);
  SolveConfig bad = TightConfig(-1.0);
  EXPECT_THROW(bad.Validate(), ConfigError);
}

TEST(Solver, PerStimulusResponse) {
  const std::vector<double> m = {0.2, 0.3, 0.5};
  const std::vector<double> l = {0.1, 0.7, 0.4};
  const double beta = 2.0;
  auto q = PerStimulusResponse(Generator::Kl(), m, l, beta);
  double z = 0.0;
  for (int a = 0; a < 3; ++a) z += m[a] * std::exp(-beta * l[a]);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(q[a], m[a] * std::exp(-beta * l[a]) / z, 1e-12);
  q = PerStimulusResponse(Generator::Kl(), m, l, 1e-9);
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(q[a], m[a], 1e-8);

  // Pearson, uniform marginal, losses (0, 1), beta 1: scalar grid oracle.
  const std::vector<double> um = {0.5, 0.5};
  const std::vector<double> l2 = {0.0, 1.0};
  q = PerStimulusResponse(Generator::PearsonChi2(), um, l2, 1.0);
  double best = 1e300;
  double arg = 0.0;
  for (int i = 0; i <= 1000000; ++i) {
    const double x = i / 1e6;
    const std::vector<double> qq = {x, 1 - x};
    const double v = x * 0.0 + (1 - x) * 1.0 + Divergence(Generator::PearsonChi2(), qq, um).value();
    if (v < best) {
      best = v;
      arg = x;
    }
  }
  EXPECT_NEAR(q[0], arg, 2e-6);
}

}  // namespace
}  // namespace brh
