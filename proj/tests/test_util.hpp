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

#ifndef BRH_TESTS_TEST_UTIL_HPP_
#define BRH_TESTS_TEST_UTIL_HPP_

#include <random>
#include <vector>

#include "brh/generators.hpp"
#include "brh/matrix.hpp"
#include "brh/problem.hpp"
#include "brh/selftest.hpp"
#include "brh/solver.hpp"

namespace brh::testing {

std::vector<Generator> MainGenerators();

SolveConfig TightConfig(double beta);

// Smallest beta at which the best point mass stops being optimal, found by
// bisection of the unused-action slack on [1e-3, 1e3]; -1 when one action
// dominates on the whole range (information stays zero).
double CriticalBeta(const Generator& gen, const std::vector<double>& prior, const Matrix& loss);

// Independent brute-force sums.
double BruteExpectedLoss(const DiscreteProblem& p, const Matrix& rows);
std::vector<double> BruteMarginal(const std::vector<double>& prior, const Matrix& rows);

}  // namespace brh::testing

#endif  // BRH_TESTS_TEST_UTIL_HPP_
