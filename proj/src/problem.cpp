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

#include "brh/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "brh/errors.hpp"

namespace brh {
namespace {

void ValidateDistribution(std::span<const double> p, const char* what) {
  if (p.empty()) throw DomainError(std::string(what) + ": empty distribution");
  double total = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError(std::string(what) + ": entries must be finite and >= 0");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kProbabilityTol) {
    throw DomainError(std::string(what) + ": entries must sum to 1 (got " +
                      std::to_string(total) + ")");
  }
}

}  // namespace

void DiscreteProblem::Validate() const {
  ValidateDistribution(prior, "prior");
  if (loss.rows() != prior.size()) throw DomainError("loss rows must match the prior length");
  if (loss.cols() == 0) throw DomainError("loss must have at least one action");
  for (double v : loss.data()) {
    if (!std::isfinite(v)) throw DomainError("loss entries must be finite");
  }
}

DiscreteProblem DiscreteProblem::Scaled(double t) const {
  DiscreteProblem out = *this;
  for (double& v : out.loss.data()) v *= t;
  return out;
}

DiscreteProblem MakeProblem(std::vector<double> prior, const std::vector<std::vector<double>>& loss) {
  DiscreteProblem p;
  p.prior = std::move(prior);
  p.loss = Matrix::FromRows(loss);
  p.Validate();
  return p;
}

std::vector<double> InducedMarginal(std::span<const double> prior, const Matrix& rows) {
  if (rows.rows() != prior.size()) throw DomainError("induced_marginal: shape mismatch");
  std::vector<double> m(rows.cols(), 0.0);
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    if (prior[s] == 0.0) continue;
    for (std::size_t a = 0; a < rows.cols(); ++a) m[a] += prior[s] * rows(s, a);
  }
  double total = 0.0;
  for (double v : m) total += v;
  if (std::abs(total - 1.0) > kProbabilityTol && total > 0.0) {
    for (double& v : m) v /= total;
  }
  return m;
}

Channel::Channel(std::span<const double> prior, Matrix rows) : rows_(std::move(rows)) {
  if (rows_.rows() != prior.size()) throw DomainError("channel: row count must match the prior");
  for (std::size_t s = 0; s < rows_.rows(); ++s) ValidateDistribution(rows_.row(s), "channel row");
  marginal_ = InducedMarginal(prior, rows_);
}

Channel Channel::Independent(std::span<const double> prior, std::span<const double> law) {
  Matrix rows(prior.size(), law.size());
  for (std::size_t s = 0; s < prior.size(); ++s) {
    std::copy(law.begin(), law.end(), rows.row(s).begin());
  }
  return Channel(prior, std::move(rows));
}

Channel Channel::Uniform(std::span<const double> prior, std::size_t num_actions) {
  std::vector<double> law(num_actions, 1.0 / static_cast<double>(num_actions));
  return Independent(prior, law);
}

double ExpectedLoss(const DiscreteProblem& problem, const Channel& channel) {
  if (channel.num_stimuli() != problem.num_stimuli() ||
      channel.num_actions() != problem.num_actions()) {
    throw DomainError("expected_loss: shape mismatch");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < problem.num_stimuli(); ++s) {
    double row = 0.0;
    for (std::size_t a = 0; a < problem.num_actions(); ++a) row += channel(s, a) * problem.loss(s, a);
    total += problem.prior[s] * row;
  }
  return total;
}

Extended FMutualInformation(const Generator& gen, std::span<const double> prior,
                            const Channel& channel) {
  const auto& m = channel.marginal();
  Extended total = 0.0;
  for (std::size_t s = 0; s < channel.num_stimuli(); ++s) {
    if (prior[s] == 0.0) continue;
    Extended row = 0.0;
    for (std::size_t a = 0; a < channel.num_actions(); ++a) {
      if (m[a] == 0.0) continue;
      row += m[a] * gen.Value(channel(s, a) / m[a]);
    }
    total += prior[s] * row;
  }
  return total;
}

Extended Divergence(const Generator& gen, std::span<const double> q, std::span<const double> p) {
  if (q.size() != p.size()) throw DomainError("divergence: length mismatch");
  Extended total = 0.0;
  for (std::size_t a = 0; a < p.size(); ++a) {
    if (p[a] > 0.0) {
      total += p[a] * gen.Value(q[a] / p[a]);
    } else if (q[a] > 0.0) {
      total += q[a] * gen.RecessionSlope();
    }
  }
  return total;
}

Extended FreeEnergy(const Generator& gen, const DiscreteProblem& problem, const Channel& channel,
                    double beta) {
  if (!(beta > 0.0)) throw DomainError("free_energy: beta must be > 0");
  return Extended(ExpectedLoss(problem, channel)) +
         (1.0 / beta) * FMutualInformation(gen, problem.prior, channel);
}

double MaxRowTotalVariation(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("total variation: shape mismatch");
  double worst = 0.0;
  for (std::size_t s = 0; s < a.rows(); ++s) {
    double tv = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) tv += std::abs(a(s, j) - b(s, j));
    worst = std::max(worst, 0.5 * tv);
  }
  return worst;
}

}  // namespace brh
