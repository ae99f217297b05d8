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

#include "brh/errors.hpp"
#include "brh/hedge.hpp"
#include "brh/learning.hpp"

namespace brh {
namespace {

void CheckShapes(std::span<const double> prior, const Channel& channel, const Matrix& distortions) {
  if (channel.num_stimuli() != prior.size() || distortions.rows() != prior.size() ||
      distortions.cols() != channel.num_actions()) {
    throw DomainError("sample hedging: shape mismatch between prior, channel and distortions");
  }
}

}  // namespace

double SampleDistortion(std::span<const double> action, std::span<const double> y,
                        const RegressionTask& task) {
  return PopulationLoss(action, task) - MeanSquaredError(action, y);
}

ReweightingGap ComputeReweightingGap(std::span<const double> prior, const Channel& channel,
                                     const Matrix& distortions) {
  CheckShapes(prior, channel, distortions);
  const auto& m = channel.marginal();
  ReweightingGap out;
  for (std::size_t s = 0; s < prior.size(); ++s) {
    for (std::size_t a = 0; a < m.size(); ++a) {
      const double c = distortions(s, a);
      out.channel_weighted += prior[s] * channel(s, a) * c;
      if (m[a] > 0.0) out.product_form += prior[s] * m[a] * (channel(s, a) / m[a] - 1.0) * c;
    }
  }
  out.difference = out.channel_weighted - out.product_form;
  return out;
}

double CertificateMargin(const Generator& gen, std::span<const double> prior, const Channel& channel,
                         double beta, double n, const Matrix& distortions) {
  CheckShapes(prior, channel, distortions);
  if (!(beta > 0.0) || !(n > 0.0)) throw DomainError("certificate margin: beta and n must be > 0");
  DiscreteProblem problem;
  problem.prior.assign(prior.begin(), prior.end());
  problem.loss = Matrix(prior.size(), channel.num_actions(), 0.0);
  const PerturbationTable opt = OptimalPerturbation(gen, problem, channel, beta * n);
  double acc = 0.0;
  for (std::size_t s = 0; s < prior.size(); ++s) {
    for (std::size_t a = 0; a < channel.num_actions(); ++a) {
      const double w = prior[s] * channel(s, a);
      if (w <= 0.0) continue;
      acc += w * (opt.values(s, a) - distortions(s, a));
    }
  }
  return acc;
}

}  // namespace brh
