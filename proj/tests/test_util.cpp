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

#include "test_util.hpp"

#include <algorithm>
#include <cmath>

#include "brh/hedge.hpp"

namespace brh::testing {

std::vector<Generator> MainGenerators() {
  return {Generator::Kl(), Generator::PearsonChi2(), Generator::SqHellinger()};
}

SolveConfig TightConfig(double beta) {
  SolveConfig c;
  c.beta = beta;
  c.tol = 1e-11;
  return c;
}

double CriticalBeta(const Generator& gen, const std::vector<double>& prior, const Matrix& loss) {
  const std::size_t ns = loss.rows();
  const std::size_t na = loss.cols();
  std::size_t best = 0;
  double best_loss = 1e300;
  for (std::size_t a = 0; a < na; ++a) {
    double e = 0.0;
    for (std::size_t s = 0; s < ns; ++s) e += prior[s] * loss(s, a);
    if (e < best_loss) {
      best_loss = e;
      best = a;
    }
  }
  std::vector<double> level(ns);
  for (std::size_t s = 0; s < ns; ++s) level[s] = loss(s, best);
  auto slack = [&](double beta) {
    double worst = -1e300;
    for (std::size_t a = 0; a < na; ++a) {
      if (a == best) continue;
      std::vector<double> col(ns);
      for (std::size_t s = 0; s < ns; ++s) col[s] = loss(s, a);
      worst = std::max(worst, ZeroColumnSlack(gen, prior, col, level, beta));
    }
    return worst;
  };
  double lo = 1e-3;
  double hi = 1e3;
  if (slack(hi) <= 0.0) return -1.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    (slack(mid) > 0.0 ? hi : lo) = mid;
  }
  return hi;
}

double BruteExpectedLoss(const DiscreteProblem& p, const Matrix& rows) {
  double acc = 0.0;
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    for (std::size_t a = 0; a < rows.cols(); ++a) acc += p.prior[s] * rows(s, a) * p.loss(s, a);
  }
  return acc;
}

std::vector<double> BruteMarginal(const std::vector<double>& prior, const Matrix& rows) {
  std::vector<double> m(rows.cols(), 0.0);
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    for (std::size_t a = 0; a < rows.cols(); ++a) m[a] += prior[s] * rows(s, a);
  }
  return m;
}

}  // namespace brh::testing
