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

#ifndef BRH_SOLVER_HPP_
#define BRH_SOLVER_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brh/generators.hpp"
#include "brh/problem.hpp"

namespace brh {

enum class StepRule { kFixed, kBacktracking };
enum class InitRule { kUniform, kMarginalSeed, kWarmStart };
// kResponse moves each row toward its fixed-marginal best response to the
// current gradient (Blahut-Arimoto for KL). kProjectedGradient takes
// Euclidean projected steps along the row-preconditioned gradient.
enum class SolveMethod { kResponse, kProjectedGradient };

struct SolveConfig {
  double beta = 1.0;
  int max_iters = 200000;
  double tol = 1e-10;
  StepRule step_rule = StepRule::kBacktracking;
  InitRule init = InitRule::kUniform;
  std::optional<Channel> warm_start;
  SolveMethod method = SolveMethod::kResponse;
  bool record_trace = false;

  void Validate() const;
};

struct SolveResidual {
  double on_support = 0.0;
  double off_support = 0.0;
  // Largest ZeroColumnSlack over unused actions.
  double zero_column = 0.0;
  double total() const;
};

struct SolveReport {
  Channel channel;
  double free_energy = 0.0;
  int iters = 0;
  double residual = 0.0;
  SolveResidual residual_parts;
  bool converged = false;
  std::string method;
  // Free energy after every accepted step when record_trace is set.
  std::vector<double> free_energy_trace;
  // Trace positions where the support was changed (pruned or revived).
  std::vector<std::size_t> support_events;
};

// Max indifference violation of a channel, including unused actions.
SolveResidual ChannelResidual(const Generator& gen, const DiscreteProblem& problem,
                              const Channel& channel, double beta);

// Blahut-Arimoto in log domain.
SolveReport SolveKl(const DiscreteProblem& problem, const SolveConfig& config);

// Any smooth generator. Throws UnsupportedOperation for non-smooth ones and
// NumericFailure if a step cannot decrease the objective.
SolveReport SolveF(const Generator& gen, const DiscreteProblem& problem, const SolveConfig& config);

// SolveKl for KL, SolveF otherwise.
SolveReport Solve(const Generator& gen, const DiscreteProblem& problem, const SolveConfig& config);

// argmin_q <q, loss_row> + (1/beta) D_f(q || marginal): q(a) = m(a)
// f'^{-1}(beta (lambda - l(a))) with lambda set by normalization. Actions
// with m(a) = 0 get 0.
std::vector<double> PerStimulusResponse(const Generator& gen, std::span<const double> marginal,
                                        std::span<const double> loss_row, double beta);

}  // namespace brh

#endif  // BRH_SOLVER_HPP_
