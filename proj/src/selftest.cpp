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

#include "brh/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "brh/hedge.hpp"
#include "brh/numeric.hpp"
#include "brh/probe.hpp"
#include "brh/solver.hpp"

namespace brh {
namespace {

std::string Fmt(const char* fmt, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

std::vector<Generator> MainGenerators() {
  return {Generator::Kl(), Generator::PearsonChi2(), Generator::SqHellinger()};
}

SolveConfig Tight(double beta) {
  SolveConfig c;
  c.beta = beta;
  c.tol = 1e-11;
  return c;
}

}  // namespace

DiscreteProblem RandomProblem(std::size_t ns, std::size_t na, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> prior(ns);
  double total = 0.0;
  for (double& p : prior) total += (p = ex(rng) + 1e-3);
  for (double& p : prior) p /= total;
  std::vector<std::vector<double>> loss(ns, std::vector<double>(na));
  for (auto& row : loss) {
    for (double& v : row) v = u(rng);
  }
  return MakeProblem(std::move(prior), loss);
}

Channel RandomInteriorChannel(std::span<const double> prior, std::size_t na, std::mt19937_64& rng) {
  std::exponential_distribution<double> ex(1.0);
  Matrix rows(prior.size(), na);
  for (std::size_t s = 0; s < prior.size(); ++s) {
    double total = 0.0;
    for (std::size_t a = 0; a < na; ++a) total += (rows(s, a) = ex(rng) + 0.05);
    for (std::size_t a = 0; a < na; ++a) rows(s, a) /= total;
  }
  return Channel(prior, std::move(rows));
}

double RawInformation(const Generator& gen, std::span<const double> prior, const Matrix& rows) {
  std::vector<double> m(rows.cols(), 0.0);
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    for (std::size_t a = 0; a < rows.cols(); ++a) m[a] += prior[s] * rows(s, a);
  }
  double acc = 0.0;
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    for (std::size_t a = 0; a < rows.cols(); ++a) {
      if (m[a] <= 0.0) continue;
      acc += prior[s] * m[a] * gen.Value(rows(s, a) / m[a]).value();
    }
  }
  return acc;
}

std::vector<SelftestCheck> RunSelftest(std::uint64_t seed) {
  std::vector<SelftestCheck> out;
  const auto gens = MainGenerators();
  const std::vector<double> betas = {0.5, 2.0, 8.0};

  {
    std::mt19937_64 rng(DeriveSeed(seed, 1));
    double worst_cert = 0.0;
    double worst_on = 0.0;
    double worst_off = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const DiscreteProblem p = RandomProblem(2 + trial % 4, 2 + (trial * 3) % 4, rng);
      for (const auto& g : gens) {
        for (double b : betas) {
          const SolveReport r = Solve(g, p, Tight(b));
          const double lhs = Certificate(g, p, r.channel, b);
          const double rhs = ExpectedLoss(p, r.channel) +
                             FMutualInformation(g, p.prior, r.channel).value() / b;
          worst_cert = std::max(worst_cert, std::abs(lhs - rhs));
          worst_on = std::max(worst_on, r.residual_parts.on_support);
          worst_off = std::max(worst_off, r.residual_parts.off_support);
        }
      }
    }
    out.push_back({"certificate_identity", worst_cert <= 1e-9, Fmt("max |L_adv - (L + I/beta)| = %.3g", worst_cert)});
    out.push_back({"indifference", worst_on <= 1e-6 && worst_off <= 1e-6,
                   Fmt("on-support %.3g, off-support violation %.3g", worst_on, worst_off)});
  }

  {
    std::mt19937_64 rng(DeriveSeed(seed, 2));
    double worst = 0.0;
    for (const auto& g : gens) {
      for (int trial = 0; trial < 10; ++trial) {
        const DiscreteProblem p = RandomProblem(3, 3, rng);
        const Channel ch = RandomInteriorChannel(p.prior, 3, rng);
        const double beta = 1.5;
        const PerturbationTable t = OptimalPerturbation(g, p, ch, beta);
        for (std::size_t s = 0; s < 3; ++s) {
          for (std::size_t a = 0; a < 3; ++a) {
            const double h = 1e-6;
            Matrix up = ch.rows();
            Matrix dn = ch.rows();
            up(s, a) += h;
            dn(s, a) -= h;
            const double fd = (RawInformation(g, p.prior, up) - RawInformation(g, p.prior, dn)) / (2 * h);
            const double analytic = beta * t.values(s, a) * p.prior[s];
            worst = std::max(worst, std::abs(fd - analytic) / std::max(1e-3, std::abs(fd)));
          }
        }
      }
    }
    out.push_back({"hedge_gradient", worst <= 1e-5, Fmt("max relative error %.3g", worst)});
  }

  {
    std::mt19937_64 rng(DeriveSeed(seed, 3));
    double worst = -1e300;
    for (int trial = 0; trial < 3; ++trial) {
      const DiscreteProblem p = RandomProblem(2, 2, rng);
      for (const auto& g : gens) {
        const double beta = 2.0;
        const double fe = FreeEnergy(g, p, Solve(g, p, Tight(beta)).channel, beta).value();
        double best = 1e300;
        const int grid = 400;
        Matrix rows(2, 2);
        for (int i = 0; i <= grid; ++i) {
          for (int j = 0; j <= grid; ++j) {
            rows(0, 0) = static_cast<double>(i) / grid;
            rows(0, 1) = 1.0 - rows(0, 0);
            rows(1, 0) = static_cast<double>(j) / grid;
            rows(1, 1) = 1.0 - rows(1, 0);
            const double v = p.prior[0] * (rows(0, 0) * p.loss(0, 0) + rows(0, 1) * p.loss(0, 1)) +
                             p.prior[1] * (rows(1, 0) * p.loss(1, 0) + rows(1, 1) * p.loss(1, 1)) +
                             RawInformation(g, p.prior, rows) / beta;
            best = std::min(best, v);
          }
        }
        worst = std::max(worst, fe - best);
      }
    }
    out.push_back({"grid_optimality_2x2", worst <= 1e-5, Fmt("max (solver - grid) free energy %.3g", worst)});
  }

  {
    // Symmetric task: information is positive at every beta > 0.
    const DiscreteProblem p =
        MakeProblem({0.3, 0.3, 0.4}, {{0.0, 1.0, 0.8}, {1.0, 0.0, 0.9}, {0.7, 1.0, 0.1}});
    const SolverBox box(Generator::Kl(), p.prior, 3);
    ProbeConfig cfg;
    cfg.controls = GeometricGrid(2.0, 8.0, 10);
    cfg.anchor = 8.0;
    cfg.seed = seed;
    double worst = 0.0;
    bool ok = true;
    try {
      const auto recs = RunProbe(box, p.loss, cfg);
      for (const auto& r : recs) {
        if (r.beta_hat > 0.0) worst = std::max(worst, std::abs(r.beta_hat / r.control - 1.0));
      }
    } catch (const std::exception&) {
      ok = false;
    }
    out.push_back({"probe_round_trip_kl", ok && worst <= 0.02, Fmt("max relative beta error %.3g", worst)});
  }
  return out;
}

}  // namespace brh
