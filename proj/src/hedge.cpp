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

#include "brh/hedge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "brh/errors.hpp"
#include "brh/numeric.hpp"

namespace brh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

std::vector<double> MarginalCorrection(const Generator& gen, std::span<const double> prior,
                                       const Channel& channel) {
  RequireSmooth(gen, "marginal_correction");
  const std::size_t na = channel.num_actions();
  std::vector<double> g(na, 0.0);
  if (gen.id() == GeneratorId::kKl) return g;  // f(r) - r f'(r) = 1 - r averages to 0
  const auto& m = channel.marginal();
  for (std::size_t a = 0; a < na; ++a) {
    Extended acc = 0.0;
    for (std::size_t s = 0; s < channel.num_stimuli(); ++s) {
      if (prior[s] == 0.0) continue;
      const double r = m[a] > 0.0 ? channel(s, a) / m[a] : 0.0;
      acc += prior[s] * (gen.Value(r) - gen.XPrime(r));
    }
    g[a] = acc.to_double();
  }
  return g;
}

PerturbationTable OptimalPerturbation(const Generator& gen, const DiscreteProblem& problem,
                                      const Channel& channel, double beta) {
  if (!(beta > 0.0)) throw DomainError("optimal_perturbation: beta must be > 0");
  const std::vector<double> g = MarginalCorrection(gen, problem.prior, channel);
  const auto& m = channel.marginal();
  PerturbationTable table;
  table.values = Matrix(channel.num_stimuli(), channel.num_actions());
  bool clipped = false;
  bool zero_column = false;
  for (std::size_t s = 0; s < channel.num_stimuli(); ++s) {
    for (std::size_t a = 0; a < channel.num_actions(); ++a) {
      const double q = channel(s, a);
      double r = 0.0;
      if (m[a] > 0.0) {
        r = q / m[a];
      } else {
        zero_column = true;
      }
      if (q > 0.0 && r < kSupportEps) {
        r = kSupportEps;
        clipped = true;
      }
      const Extended c = gen.Prime(r) + Extended(g[a]);
      table.values(s, a) = c.to_double() / beta;
    }
  }
  if (clipped) table.warnings.push_back("ratios below support_eps clipped before f'");
  if (zero_column) table.warnings.push_back("actions with zero marginal evaluated at ratio 0");
  table.penalty = AdversarialPenalty(gen, problem.prior, channel, table.values, beta);
  return table;
}

Extended AdversarialPenalty(const Generator& gen, std::span<const double> prior,
                            const Channel& channel, const Matrix& values, double beta) {
  if (!(beta > 0.0)) throw DomainError("adversarial_penalty: beta must be > 0");
  const auto& m = channel.marginal();
  Extended total = 0.0;
  for (std::size_t s = 0; s < values.rows(); ++s) {
    if (prior[s] == 0.0) continue;
    for (std::size_t a = 0; a < values.cols(); ++a) {
      const double mass = prior[s] * m[a];
      if (mass == 0.0) continue;
      const double c = values(s, a);
      const Extended fs = c == -kInf ? gen.ConjugateAtMinusInfinity() : gen.Conjugate(beta * c);
      total += mass * fs;
    }
  }
  return (1.0 / beta) * total;
}

double Certificate(const Generator& gen, const DiscreteProblem& problem, const Channel& channel,
                   double beta) {
  const PerturbationTable table = OptimalPerturbation(gen, problem, channel, beta);
  double hedge = 0.0;
  for (std::size_t s = 0; s < channel.num_stimuli(); ++s) {
    for (std::size_t a = 0; a < channel.num_actions(); ++a) {
      const double mass = problem.prior[s] * channel(s, a);
      if (mass == 0.0) continue;
      const double c = table.values(s, a);
      if (!std::isfinite(c)) throw NumericFailure("certificate: infinite perturbation carries joint mass");
      hedge += mass * c;
    }
  }
  return ExpectedLoss(problem, channel) + hedge;
}

IndifferenceReport IndifferenceResidual(const DiscreteProblem& problem, const Channel& channel,
                                        const Matrix& values, double support_eps) {
  const std::size_t ns = channel.num_stimuli();
  const std::size_t na = channel.num_actions();
  const auto& m = channel.marginal();
  IndifferenceReport rep;
  rep.on_support.assign(ns, 0.0);
  rep.off_support.assign(ns, 0.0);
  rep.level.assign(ns, 0.0);
  rep.support_size.assign(ns, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    if (problem.prior[s] == 0.0) continue;
    double sum = 0.0;
    std::size_t k = 0;
    for (std::size_t a = 0; a < na; ++a) {
      if (channel(s, a) > support_eps && std::isfinite(values(s, a))) {
        sum += problem.loss(s, a) + values(s, a);
        ++k;
      }
    }
    if (k == 0) throw DomainError("indifference_residual: empty support in row " + std::to_string(s));
    const double level = sum / static_cast<double>(k);
    rep.level[s] = level;
    rep.support_size[s] = k;
    for (std::size_t a = 0; a < na; ++a) {
      const double c = values(s, a);
      if (!std::isfinite(c)) continue;
      const double eff = problem.loss(s, a) + c;
      if (channel(s, a) > support_eps) {
        rep.on_support[s] = std::max(rep.on_support[s], std::abs(eff - level));
      } else if (m[a] > 0.0) {
        rep.off_support[s] = std::max(rep.off_support[s], level - eff);
      }
    }
    rep.max_on_support = std::max(rep.max_on_support, rep.on_support[s]);
    rep.max_off_support = std::max(rep.max_off_support, rep.off_support[s]);
  }
  return rep;
}

double ZeroColumnSlack(const Generator& gen, std::span<const double> prior,
                       std::span<const double> loss_column, std::span<const double> level,
                       double beta) {
  std::vector<double> y;
  std::vector<double> w;
  for (std::size_t s = 0; s < prior.size(); ++s) {
    if (prior[s] == 0.0) continue;
    y.push_back(beta * (level[s] - loss_column[s]));
    w.push_back(prior[s]);
  }
  if (y.empty()) return -kInf;
  if (gen.id() == GeneratorId::kKl) {
    std::vector<double> t(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) t[i] = y[i] + std::log(w[i]);
    return LogSumExp(t) / beta;
  }
  RequireSmooth(gen, "zero-column slack");
  const double ymax = *std::max_element(y.begin(), y.end());
  const double hi_range = gen.fprime_range().hi;
  // h'(mu) = 1 - sum_s P(s) f*'(y_s - mu) is increasing and >= 0 at ymax.
  auto dh = [&](double mu) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double z = y[i] - mu;
      if (z >= hi_range) return -kInf;
      acc += w[i] * gen.PrimeInverse(z);
    }
    return 1.0 - acc;
  };
  double lo;
  if (std::isfinite(hi_range)) {
    lo = ymax - hi_range;
  } else {
    double step = 1.0;
    lo = ymax - step;
    while (dh(lo) > 0.0) {
      step *= 2.0;
      lo = ymax - step;
      if (step > 1e300) throw NumericFailure("zero-column slack: no bracket");
    }
  }
  const double mu = BisectIncreasing(dh, lo, ymax);
  Extended h = mu;
  for (std::size_t i = 0; i < y.size(); ++i) h += w[i] * gen.Conjugate(y[i] - mu);
  return h.to_double() / beta;
}

namespace {

Matrix GridImpl(const Generator& gen, const DiscreteProblem& problem,
                std::span<const double> beta_grid, std::span<const double> beta_adv_grid,
                const SolveConfig& base, bool parallel) {
  const std::size_t nb = beta_grid.size();
  std::vector<double> loss(nb, std::numeric_limits<double>::quiet_NaN());
  std::vector<double> info(nb, std::numeric_limits<double>::quiet_NaN());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t i = 0; i < nb; ++i) {
    try {
      SolveConfig cfg = base;
      cfg.beta = beta_grid[i];
      const SolveReport rep = Solve(gen, problem, cfg);
      loss[i] = ExpectedLoss(problem, rep.channel);
      info[i] = FMutualInformation(gen, problem.prior, rep.channel).to_double();
    } catch (const Error&) {
      // Cell stays NaN.
    }
  }
  Matrix out(nb, beta_adv_grid.size());
  for (std::size_t i = 0; i < nb; ++i) {
    for (std::size_t j = 0; j < beta_adv_grid.size(); ++j) {
      out(i, j) = loss[i] + info[i] / beta_adv_grid[j];
    }
  }
  return out;
}

}  // namespace

Matrix EffectiveLossGrid(const Generator& gen, const DiscreteProblem& problem,
                         std::span<const double> beta_grid, std::span<const double> beta_adv_grid,
                         const SolveConfig& base) {
  return GridImpl(gen, problem, beta_grid, beta_adv_grid, base, true);
}

Matrix EffectiveLossGridSerial(const Generator& gen, const DiscreteProblem& problem,
                               std::span<const double> beta_grid,
                               std::span<const double> beta_adv_grid, const SolveConfig& base) {
  return GridImpl(gen, problem, beta_grid, beta_adv_grid, base, false);
}

}  // namespace brh
