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

#ifndef BRH_PROBLEM_HPP_
#define BRH_PROBLEM_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "brh/extended.hpp"
#include "brh/generators.hpp"
#include "brh/matrix.hpp"

namespace brh {

inline constexpr double kProbabilityTol = 1e-12;

// Prior over stimuli and an n_s x n_a loss matrix.
struct DiscreteProblem {
  std::vector<double> prior;
  Matrix loss;
  std::vector<std::string> stimulus_labels;
  std::vector<std::string> action_labels;

  std::size_t num_stimuli() const { return prior.size(); }
  std::size_t num_actions() const { return loss.cols(); }

  // Throws DomainError on a malformed prior or non-finite losses.
  void Validate() const;
  // Same prior, loss scaled by t.
  DiscreteProblem Scaled(double t) const;
};

DiscreteProblem MakeProblem(std::vector<double> prior, const std::vector<std::vector<double>>& loss);

// Exact weighted row average; renormalized by uniform scaling only if the
// total drifts from 1 by more than kProbabilityTol.
std::vector<double> InducedMarginal(std::span<const double> prior, const Matrix& rows);

// Row-stochastic P(a|s) with its cached marginal P(a).
class Channel {
 public:
  Channel() = default;
  // Validates rows and computes the marginal.
  Channel(std::span<const double> prior, Matrix rows);

  // Rows equal to the given action law for every stimulus.
  static Channel Independent(std::span<const double> prior, std::span<const double> law);
  static Channel Uniform(std::span<const double> prior, std::size_t num_actions);

  const Matrix& rows() const { return rows_; }
  const std::vector<double>& marginal() const { return marginal_; }
  std::size_t num_stimuli() const { return rows_.rows(); }
  std::size_t num_actions() const { return rows_.cols(); }
  double operator()(std::size_t s, std::size_t a) const { return rows_(s, a); }

 private:
  Matrix rows_;
  std::vector<double> marginal_;
};

double ExpectedLoss(const DiscreteProblem& problem, const Channel& channel);

// sum_s P(s) sum_a P(a) f(P(a|s)/P(a)), in nats. Columns with P(a) = 0 carry
// no mass and are skipped.
Extended FMutualInformation(const Generator& gen, std::span<const double> prior,
                            const Channel& channel);

// sum_a p(a) f(q(a)/p(a)) with 0 f(0/0) = 0 and q(a) * f'(inf) on p(a) = 0.
Extended Divergence(const Generator& gen, std::span<const double> q, std::span<const double> p);

// L + I_f / beta.
Extended FreeEnergy(const Generator& gen, const DiscreteProblem& problem, const Channel& channel,
                    double beta);

// Max over rows of total variation distance between two channels.
double MaxRowTotalVariation(const Matrix& a, const Matrix& b);

}  // namespace brh

#endif  // BRH_PROBLEM_HPP_
