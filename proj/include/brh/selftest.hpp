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

#ifndef BRH_SELFTEST_HPP_
#define BRH_SELFTEST_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "brh/generators.hpp"
#include "brh/matrix.hpp"
#include "brh/problem.hpp"

namespace brh {

struct SelftestCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Small white-box suites: certificate identity, indifference, hedge versus
// finite-difference gradient, grid-search optimality on 2x2 problems, and a
// probe round trip on KL.
std::vector<SelftestCheck> RunSelftest(std::uint64_t seed);

// Random problem: prior from normalized exponentials, losses U[0, 1].
DiscreteProblem RandomProblem(std::size_t ns, std::size_t na, std::mt19937_64& rng);

// Random channel with every entry positive.
Channel RandomInteriorChannel(std::span<const double> prior, std::size_t na, std::mt19937_64& rng);

// I_f of rows that need not be normalized: sum_s P(s) sum_a m(a) f(q/m)
// with m(a) = sum_s P(s) q(s, a). Used as a finite-difference oracle.
double RawInformation(const Generator& gen, std::span<const double> prior, const Matrix& rows);

}  // namespace brh

#endif  // BRH_SELFTEST_HPP_
