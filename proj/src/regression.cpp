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
#include <numbers>
#include <random>

#include "brh/errors.hpp"
#include "brh/learning.hpp"

namespace brh {

RegressionTask RegressionTask::Make(int n, double noise_sd) {
  if (n < 2) throw ConfigError("regression task: n must be >= 2");
  if (!(noise_sd >= 0.0)) throw ConfigError("regression task: noise_sd must be >= 0");
  RegressionTask t;
  t.noise_sd = noise_sd;
  t.design.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t.design[i] = -1.0 + 2.0 * i / (n - 1);
  return t;
}

double RegressionTask::Mean(double x) { return 0.8 * std::sin(std::numbers::pi * x) + 0.25 * x; }

std::vector<double> RegressionTask::MeanVector() const {
  std::vector<double> m(design.size());
  for (std::size_t i = 0; i < design.size(); ++i) m[i] = Mean(design[i]);
  return m;
}

std::vector<double> SampleTask(const RegressionTask& task, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> y = task.MeanVector();
  for (double& v : y) v += task.noise_sd * noise(rng);
  return y;
}

double MeanSquaredError(std::span<const double> prediction, std::span<const double> target) {
  if (prediction.size() != target.size() || target.empty()) {
    throw DomainError("mean_squared_error: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double d = prediction[i] - target[i];
    acc += d * d;
  }
  return acc / static_cast<double>(target.size());
}

KernelRidge::KernelRidge(const RegressionTask& task, double lengthscale) {
  if (!(lengthscale > 0.0)) throw ConfigError("kernel ridge: lengthscale must be > 0");
  const auto n = static_cast<Eigen::Index>(task.n());
  gram_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = task.design[i] - task.design[j];
      gram_(i, j) = std::exp(-0.5 * d * d / (lengthscale * lengthscale));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_);
  if (eig.info() != Eigen::Success) throw NumericFailure("kernel ridge: eigendecomposition failed");
  vectors_ = eig.eigenvectors();
  // The Gram matrix is PSD; clip rounding negatives.
  values_ = eig.eigenvalues().cwiseMax(0.0);
}

std::vector<double> KernelRidge::Fit(std::span<const double> y, double ridge) const {
  const auto n = gram_.rows();
  if (static_cast<Eigen::Index>(y.size()) != n) throw DomainError("kernel ridge: sample length mismatch");
  if (!(ridge > 0.0)) throw DomainError("kernel ridge: ridge must be > 0");
  const double shift = static_cast<double>(n) * ridge;
  if (std::isinf(shift)) {
    return std::vector<double>(y.size(), 0.0);
  }
  if (shift < 1e-14 * values_.maxCoeff()) throw NumericFailure("kernel ridge: ridge underflow");
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);
  Eigen::VectorXd coef = vectors_.transpose() * yv;
  for (Eigen::Index j = 0; j < n; ++j) coef[j] *= values_[j] / (values_[j] + shift);
  const Eigen::VectorXd pred = vectors_ * coef;
  return std::vector<double>(pred.data(), pred.data() + n);
}

std::vector<double> KernelRidgeFit(const RegressionTask& task, std::span<const double> y,
                                   double lengthscale, double ridge) {
  return KernelRidge(task, lengthscale).Fit(y, ridge);
}

double PopulationLoss(std::span<const double> action, const RegressionTask& task) {
  const std::vector<double> mean = task.MeanVector();
  return MeanSquaredError(action, mean) + task.noise_sd * task.noise_sd;
}

}  // namespace brh
