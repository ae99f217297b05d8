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

#ifndef BRH_LEARNING_HPP_
#define BRH_LEARNING_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "brh/generators.hpp"
#include "brh/matrix.hpp"
#include "brh/problem.hpp"

#include <Eigen/Dense>

namespace brh {

// Fixed-design regression: y_i = mean(x_i) + N(0, noise_sd^2) on n equally
// spaced points of [-1, 1].
struct RegressionTask {
  std::vector<double> design;
  double noise_sd = 0.15;

  static RegressionTask Make(int n = 100, double noise_sd = 0.15);
  std::size_t n() const { return design.size(); }
  static double Mean(double x);
  std::vector<double> MeanVector() const;
};

std::vector<double> SampleTask(const RegressionTask& task, std::uint64_t seed);

double MeanSquaredError(std::span<const double> prediction, std::span<const double> target);

// Closed-form kernel ridge regression with a Gaussian kernel on the design:
// predictions K (K + n ridge I)^{-1} y. The kernel eigendecomposition is
// computed once; every fit is then O(n^2).
class KernelRidge {
 public:
  KernelRidge(const RegressionTask& task, double lengthscale);
  std::vector<double> Fit(std::span<const double> y, double ridge) const;
  const Eigen::MatrixXd& gram() const { return gram_; }

 private:
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd values_;
};

std::vector<double> KernelRidgeFit(const RegressionTask& task, std::span<const double> y,
                                   double lengthscale, double ridge);

// One hidden ReLU layer, scalar tanh output: f(x) = tanh(w2 . relu(w1 x + b1) + b2).
struct MlpParams {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  std::size_t hidden() const { return w1.size(); }
  std::size_t size() const { return 3 * w1.size() + 1; }
  // Flat order: w1, b1, w2, b2.
  std::vector<double> Flatten() const;
  static MlpParams Unflatten(std::span<const double> flat, std::size_t hidden);
};

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for weights and biases of both
// layers.
MlpParams InitMlp(std::size_t hidden, std::uint64_t seed);

std::vector<double> MlpPredict(const MlpParams& params, std::span<const double> x);

// scale * mean squared error and its gradient in Flatten order.
double MlpLossAndGradient(const MlpParams& params, std::span<const double> x,
                          std::span<const double> y, double scale, std::vector<double>& grad);

struct MlpConfig {
  std::size_t hidden = 32;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Full-batch Adam on scale * MSE. Returns design predictions after each
// requested step count (ascending; 0 gives the initial network).
std::vector<std::vector<double>> MlpFit(const RegressionTask& task, std::span<const double> y,
                                        const MlpConfig& config, std::span<const int> checkpoints,
                                        std::uint64_t seed, double loss_scale = 1.0);

struct Codebook {
  std::vector<std::vector<double>> codes;
  double temperature = 1.0;
  // Within-cluster sum of squares after each Lloyd iteration.
  std::vector<double> objective_trace;
  int iterations = 0;
};

// k-means++ seeding and Lloyd iterations until the assignment is fixed or
// 100 iterations. Temperature: median pairwise code distance / sqrt(2).
Codebook BuildCodebook(const std::vector<std::vector<double>>& pilots, std::size_t k,
                       std::uint64_t seed);

double MedianPairwiseDistance(const std::vector<std::vector<double>>& codes);

// Weights proportional to exp(-|p - code|^2 / (2 T^2)).
std::vector<double> SoftAssign(std::span<const double> prediction, const Codebook& codebook);

// Population squared loss of a prediction vector: mean (a_i - mean_i)^2 + sd^2.
double PopulationLoss(std::span<const double> action, const RegressionTask& task);

// C_{s,n}(a) = population loss - empirical loss on sample y.
double SampleDistortion(std::span<const double> action, std::span<const double> y,
                        const RegressionTask& task);

struct ReweightingGap {
  // sum P(s,a) C.
  double channel_weighted = 0.0;
  // sum P(s) P(a) (r - 1) C.
  double product_form = 0.0;
  double difference = 0.0;
};

ReweightingGap ComputeReweightingGap(std::span<const double> prior, const Channel& channel,
                                     const Matrix& distortions);

// sum P(s,a) [C^opt - C] with C^opt the hedge at scale 1/(beta n).
double CertificateMargin(const Generator& gen, std::span<const double> prior, const Channel& channel,
                         double beta, double n, const Matrix& distortions);

}  // namespace brh

#endif  // BRH_LEARNING_HPP_
