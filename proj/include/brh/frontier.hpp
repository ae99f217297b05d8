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

#ifndef BRH_FRONTIER_HPP_
#define BRH_FRONTIER_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "brh/generators.hpp"
#include "brh/problem.hpp"
#include "brh/solver.hpp"

namespace brh {

struct OperatingPoint {
  double beta = 0.0;
  bool solved = false;
  std::string error;
  double info_native = 0.0;
  double loss = 0.0;
  double certificate = 0.0;
  // Reference generator name -> I_g of the same joint law.
  std::map<std::string, double> info_projected;
  std::vector<std::string> flags;
  std::optional<Channel> channel;
  int iters = 0;
  double residual = 0.0;
};

struct FrontierCurve {
  std::string generator;
  std::vector<OperatingPoint> points;
  std::uint64_t problem_hash = 0;
  // Indices i > 0 where info drops or loss rises from point i-1 to i.
  std::vector<std::size_t> non_monotone;
};

struct TraceConfig {
  SolveConfig solve;
  bool keep_channels = true;
  double monotone_tol = 1e-8;
  // Tolerance of the serial warm-start pass that seeds parallel solves.
  double warm_tol = 1e-4;
};

// FNV-1a over shape, prior and losses.
std::uint64_t ProblemHash(const DiscreteProblem& problem);

// Serial pass over the grid, each solve warm-started from the previous one.
FrontierCurve TraceSerial(const Generator& gen, const DiscreteProblem& problem,
                          std::span<const double> beta_grid, const TraceConfig& config);

// Coarse serial warm-start pass, then full-tolerance solves in parallel.
FrontierCurve Trace(const Generator& gen, const DiscreteProblem& problem,
                    std::span<const double> beta_grid, const TraceConfig& config);

// Adds I_ref of each retained channel to info_projected. Loss and
// certificate are untouched.
FrontierCurve Project(const FrontierCurve& curve, const Generator& reference,
                      std::span<const double> prior);

// Operating point of gen whose loss equals target_loss, searched on log beta
// inside [beta_lo, beta_hi]. Throws DomainError if the target is not
// bracketed.
OperatingPoint MatchLoss(const Generator& gen, const DiscreteProblem& problem, double target_loss,
                         double beta_lo, double beta_hi, const SolveConfig& config);

}  // namespace brh

#endif  // BRH_FRONTIER_HPP_
