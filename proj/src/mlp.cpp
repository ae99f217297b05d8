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

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "brh/errors.hpp"
#include "brh/learning.hpp"

namespace brh {

std::vector<double> MlpParams::Flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), w1.begin(), w1.end());
  flat.insert(flat.end(), b1.begin(), b1.end());
  flat.insert(flat.end(), w2.begin(), w2.end());
  flat.push_back(b2);
  return flat;
}

MlpParams MlpParams::Unflatten(std::span<const double> flat, std::size_t hidden) {
  if (flat.size() != 3 * hidden + 1) throw DomainError("mlp: flat parameter length mismatch");
  MlpParams p;
  p.w1.assign(flat.begin(), flat.begin() + hidden);
  p.b1.assign(flat.begin() + hidden, flat.begin() + 2 * hidden);
  p.w2.assign(flat.begin() + 2 * hidden, flat.begin() + 3 * hidden);
  p.b2 = flat[3 * hidden];
  return p;
}

MlpParams InitMlp(std::size_t hidden, std::uint64_t seed) {
  if (hidden == 0) throw ConfigError("mlp: hidden width must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> first(-1.0, 1.0);
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  std::uniform_real_distribution<double> second(-bound2, bound2);
  MlpParams p;
  p.w1.resize(hidden);
  p.b1.resize(hidden);
  p.w2.resize(hidden);
  for (std::size_t j = 0; j < hidden; ++j) p.w1[j] = first(rng);
  for (std::size_t j = 0; j < hidden; ++j) p.b1[j] = first(rng);
  for (std::size_t j = 0; j < hidden; ++j) p.w2[j] = second(rng);
  p.b2 = second(rng);
  return p;
}

std::vector<double> MlpPredict(const MlpParams& params, std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = params.b2;
    for (std::size_t j = 0; j < params.hidden(); ++j) {
      z += params.w2[j] * std::max(0.0, params.w1[j] * x[i] + params.b1[j]);
    }
    out[i] = std::tanh(z);
  }
  return out;
}

namespace {

// Loss and gradient on the flat parameter vector; grad must have 3h + 1
// entries. The training loop calls this directly to avoid unflattening.
double FlatLossAndGradient(std::span<const double> theta, std::size_t h, std::span<const double> x,
                           std::span<const double> y, double scale, std::span<double> grad,
                           std::vector<double>& pre) {
  const double* w1 = theta.data();
  const double* b1 = w1 + h;
  const double* w2 = b1 + h;
  const double b2 = theta[3 * h];
  std::fill(grad.begin(), grad.end(), 0.0);
  pre.resize(h);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double z = b2;
    for (std::size_t j = 0; j < h; ++j) {
      pre[j] = w1[j] * x[i] + b1[j];
      if (pre[j] > 0.0) z += w2[j] * pre[j];
    }
    const double out = std::tanh(z);
    const double r = out - y[i];
    loss += r * r;
    // d/dz of scale * r^2 / n.
    const double dz = scale * 2.0 * r * (1.0 - out * out) * inv_n;
    for (std::size_t j = 0; j < h; ++j) {
      if (pre[j] <= 0.0) continue;
      grad[2 * h + j] += dz * pre[j];
      const double dpre = dz * w2[j];
      grad[j] += dpre * x[i];
      grad[h + j] += dpre;
    }
    grad[3 * h] += dz;
  }
  return scale * loss * inv_n;
}

}  // namespace

double MlpLossAndGradient(const MlpParams& params, std::span<const double> x,
                          std::span<const double> y, double scale, std::vector<double>& grad) {
  if (x.size() != y.size() || x.empty()) throw DomainError("mlp: sample length mismatch");
  grad.assign(params.size(), 0.0);
  std::vector<double> pre;
  return FlatLossAndGradient(params.Flatten(), params.hidden(), x, y, scale, grad, pre);
}

std::vector<std::vector<double>> MlpFit(const RegressionTask& task, std::span<const double> y,
                                        const MlpConfig& config, std::span<const int> checkpoints,
                                        std::uint64_t seed, double loss_scale) {
  if (y.size() != task.n()) throw DomainError("mlp: sample length mismatch");
  if (!(config.lr > 0.0)) throw ConfigError("mlp: lr must be > 0");
  if (!(loss_scale >= 0.0)) throw DomainError("mlp: loss_scale must be >= 0");
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    if (checkpoints[k] < 0 || (k > 0 && checkpoints[k] < checkpoints[k - 1])) {
      throw ConfigError("mlp: checkpoints must be nonnegative and ascending");
    }
  }
  MlpParams params = InitMlp(config.hidden, seed);
  std::vector<double> theta = params.Flatten();
  std::vector<double> m(theta.size(), 0.0);
  std::vector<double> v(theta.size(), 0.0);
  std::vector<double> grad(theta.size());
  std::vector<double> pre;
  std::vector<std::vector<double>> out;
  out.reserve(checkpoints.size());

  int step = 0;
  double b1t = 1.0;
  double b2t = 1.0;
  for (int target : checkpoints) {
    while (step < target) {
      FlatLossAndGradient(theta, config.hidden, task.design, y, loss_scale, grad, pre);
      ++step;
      b1t *= config.beta1;
      b2t *= config.beta2;
      for (std::size_t i = 0; i < theta.size(); ++i) {
        m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * grad[i];
        v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * grad[i] * grad[i];
        const double mh = m[i] / (1.0 - b1t);
        const double vh = v[i] / (1.0 - b2t);
        theta[i] -= config.lr * mh / (std::sqrt(vh) + config.eps);
      }
      for (double t : theta) {
        if (!std::isfinite(t)) {
          throw NumericFailure("mlp: parameters diverged at step " + std::to_string(step));
        }
      }
    }
    out.push_back(MlpPredict(MlpParams::Unflatten(theta, config.hidden), task.design));
  }
  return out;
}

}  // namespace brh
