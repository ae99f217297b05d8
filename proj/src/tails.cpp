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

#include "brh/tails.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "brh/errors.hpp"

namespace brh {
namespace {

double BinaryDivergence(const Generator& gen, double p, double q) {
  const Extended d = q * gen.Value(p / q) + (1.0 - q) * gen.Value((1.0 - p) / (1.0 - q));
  return d.to_double();
}

double BisectTransfer(const Generator& gen, double q, double info) {
  if (BinaryDivergence(gen, 1.0, q) <= info) return 1.0;
  auto g = [&](double p) { return BinaryDivergence(gen, p, q) - info; };
  double lo = q;
  double hi = 1.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

double ProductTailBound(const Generator& gen, double u, double phi, double beta) {
  if (!(beta > 0.0)) throw DomainError("product_tail_bound: beta must be > 0");
  if (!(u > 0.0)) throw DomainError("product_tail_bound: u must be > 0");
  if (!(phi >= 0.0)) throw DomainError("product_tail_bound: phi must be >= 0");
  const double head = 1.0 + beta * phi;
  const double bu = beta * u;
  double q;
  switch (gen.id()) {
    case GeneratorId::kKl:
      q = head * std::exp(-bu);
      break;
    case GeneratorId::kPearsonChi2: {
      const double d = 1.0 + 0.5 * bu;
      q = head / (d * d);
      break;
    }
    case GeneratorId::kSqHellinger:
      if (!(bu < 1.0)) throw DomainError("product_tail_bound: squared Hellinger needs beta u < 1");
      q = head * (1.0 - bu);
      break;
    default:
      throw UnsupportedOperation("product_tail_bound: no closed form for " + gen.name());
  }
  return std::clamp(q, 0.0, 1.0);
}

TransferResult TailTransfer(const Generator& gen, double q_bar, double info) {
  if (!(q_bar >= 0.0 && q_bar <= 1.0)) throw DomainError("tail_transfer: q_bar must lie in [0, 1]");
  if (!(info >= 0.0)) throw DomainError("tail_transfer: info must be >= 0");
  TransferResult out;
  if (q_bar == 0.0 || q_bar == 1.0) {
    out.delta = q_bar;
    out.flags.push_back("degenerate_q_bar");
    return out;
  }
  if (info == 0.0) {
    out.delta = q_bar;
    return out;
  }
  double p;
  switch (gen.id()) {
    case GeneratorId::kKl:
      p = BisectTransfer(gen, q_bar, info);
      break;
    case GeneratorId::kPearsonChi2:
      p = q_bar + std::sqrt(info * q_bar * (1.0 - q_bar));
      break;
    case GeneratorId::kSqHellinger: {
      if (info > 2.0) {
        out.delta = 1.0;
        out.flags.push_back("info_above_hellinger_range");
        return out;
      }
      // With p = sin^2(theta), q = sin^2(phi) the constraint reads
      // theta - phi <= arccos(1 - I/2); past theta = pi/2 every p qualifies.
      const double c = 1.0 - 0.5 * info;
      if (std::asin(std::sqrt(q_bar)) + std::acos(c) >= 0.5 * std::numbers::pi) {
        p = 1.0;
      } else {
        const double root = std::sqrt(q_bar) * c + std::sqrt(1.0 - q_bar) * std::sqrt(info - 0.25 * info * info);
        p = root * root;
      }
      break;
    }
    default:
      p = BisectTransfer(gen, q_bar, info);
      break;
  }
  out.delta = std::clamp(p, q_bar, 1.0);
  return out;
}

TailResult EvaluateTail(const TailQuery& query) {
  if (!(query.info >= 0.0)) throw DomainError("tail query: info must be >= 0");
  TailResult out;
  out.q_bar = query.q_bar_override ? *query.q_bar_override
                                   : ProductTailBound(query.gen, query.u, query.phi, query.beta);
  const TransferResult t = TailTransfer(query.gen, out.q_bar, query.info);
  out.delta = t.delta;
  out.flags = t.flags;
  return out;
}

}  // namespace brh
