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

#ifndef BRH_TAILS_HPP_
#define BRH_TAILS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "brh/generators.hpp"

namespace brh {

struct TailQuery {
  Generator gen = Generator::Kl();
  // Threshold on the perturbation, loss units.
  double u = 0.0;
  // I_f in nats.
  double info = 0.0;
  // Adversarial penalty, loss units.
  double phi = 0.0;
  double beta = 1.0;
  // Replaces the product-law bound when set.
  std::optional<double> q_bar_override;
};

// Bound on the product-law tail P x P(C > u): (1 + beta phi) / (1 + f*(beta u)),
// clipped to [0, 1]. KL, Pearson and squared Hellinger only; Hellinger needs
// 0 < beta u < 1.
double ProductTailBound(const Generator& gen, double u, double phi, double beta);

struct TransferResult {
  double delta = 0.0;
  std::vector<std::string> flags;
};

// Largest p in [q_bar, 1] with binary D_f(Bern(p) || Bern(q_bar)) <= info.
TransferResult TailTransfer(const Generator& gen, double q_bar, double info);

struct TailResult {
  double q_bar = 0.0;
  double delta = 0.0;
  std::vector<std::string> flags;
};

TailResult EvaluateTail(const TailQuery& query);

}  // namespace brh

#endif  // BRH_TAILS_HPP_
