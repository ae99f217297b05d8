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

#ifndef BRH_HEDGE_HPP_
#define BRH_HEDGE_HPP_

#include <span>
#include <string>
#include <vector>

#include "brh/extended.hpp"
#include "brh/generators.hpp"
#include "brh/matrix.hpp"
#include "brh/problem.hpp"
#include "brh/solver.hpp"

namespace brh {

// Entries with P(a|s) at or below this count as off the support.
inline constexpr double kSupportEps = 1e-12;

// G(a) = sum_s P(s) [f(r) - r f'(r)], r = P(a|s)/P(a). Columns with P(a) = 0
// use r = 0 throughout.
std::vector<double> MarginalCorrection(const Generator& gen, std::span<const double> prior,
                                       const Channel& channel);

struct PerturbationTable {
  // C_s(a) in loss units; -inf where P(a|s) = 0 and f'(0) = -inf.
  Matrix values;
  Extended penalty;
  std::vector<std::string> warnings;
};

// C_s(a) = (1/beta) [f'(r) + G(a)] with the penalty filled in.
PerturbationTable OptimalPerturbation(const Generator& gen, const DiscreteProblem& problem,
                                      const Channel& channel, double beta);

// (1/beta) sum_{s,a} P(s) P(a) f*(beta C_s(a)); a -inf entry contributes
// the limit f*(-inf) = -f(0).
Extended AdversarialPenalty(const Generator& gen, std::span<const double> prior,
                            const Channel& channel, const Matrix& values, double beta);

// L + sum_{s,a} P(s,a) C_s(a) for the optimal perturbation.
double Certificate(const Generator& gen, const DiscreteProblem& problem, const Channel& channel,
                   double beta);

struct IndifferenceReport {
  // Per stimulus: max on-support |l + C - level|.
  std::vector<double> on_support;
  // Per stimulus: worst max(0, level - (l + C)) over off-support actions with
  // a finite perturbation and positive marginal.
  std::vector<double> off_support;
  // On-support mean of the effective loss.
  std::vector<double> level;
  std::vector<std::size_t> support_size;
  double max_on_support = 0.0;
  double max_off_support = 0.0;
};

// Throws DomainError when some stimulus with positive prior has an empty
// support.
IndifferenceReport IndifferenceResidual(const DiscreteProblem& problem, const Channel& channel,
                                        const Matrix& values, double support_eps = kSupportEps);

// Loss-unit violation of optimality for keeping action a unused given
// per-stimulus levels: (1/beta) inf_mu [mu + sum_s P(s) f*(y_s - mu)] with
// y_s = beta (level_s - l(s,a)). Positive means mass should flow into a.
double ZeroColumnSlack(const Generator& gen, std::span<const double> prior,
                       std::span<const double> loss_column, std::span<const double> level,
                       double beta);

// Entry (i, j) = L(beta_i) + I_f(beta_i) / beta_adv_j for the channel solved
// at beta_i. Cells of a failed solve are NaN.
Matrix EffectiveLossGrid(const Generator& gen, const DiscreteProblem& problem,
                         std::span<const double> beta_grid, std::span<const double> beta_adv_grid,
                         const SolveConfig& base);
Matrix EffectiveLossGridSerial(const Generator& gen, const DiscreteProblem& problem,
                               std::span<const double> beta_grid,
                               std::span<const double> beta_adv_grid, const SolveConfig& base);

}  // namespace brh

#endif  // BRH_HEDGE_HPP_
