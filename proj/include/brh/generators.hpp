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

#ifndef BRH_GENERATORS_HPP_
#define BRH_GENERATORS_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "brh/extended.hpp"

namespace brh {

enum class GeneratorId {
  kKl,
  kPearsonChi2,
  kSqHellinger,
  kReverseKl,
  kNeymanChi2,
  kTotalVariation,
  kJensenShannon,
  kTriangular,
  kHockeyStick,
};

// Interval of the extended real line with open/closed ends.
struct Interval {
  double lo;
  double hi;
  bool lo_closed;
  bool hi_closed;

  bool Contains(double y) const {
    const bool above = lo_closed ? y >= lo : y > lo;
    const bool below = hi_closed ? y <= hi : y < hi;
    return above && below;
  }
};

// Generator f of an f-divergence, held in the canonical gauge f(1) = 0 and,
// when f is differentiable at 1, f'(1) = 0. Catalog entries are stored in
// their textbook form and shifted by c (x - 1), c = f'_raw(1), at
// construction. Immutable; all members are pure and thread-safe.
class Generator {
 public:
  // gamma is required for (and only accepted by) the hockey-stick generator.
  static Generator Make(GeneratorId id, std::optional<double> gamma = std::nullopt);
  // Parses the config/CLI id ("kl", "pearson_chi2", ...). Throws ConfigError
  // listing the valid ids on unknown names.
  static Generator Parse(std::string_view name, std::optional<double> gamma = std::nullopt);

  static Generator Kl() { return Make(GeneratorId::kKl); }
  static Generator PearsonChi2() { return Make(GeneratorId::kPearsonChi2); }
  static Generator SqHellinger() { return Make(GeneratorId::kSqHellinger); }

  static const std::vector<std::string>& ValidNames();

  GeneratorId id() const { return id_; }
  std::string name() const;
  double gamma() const { return gamma_; }
  // f differentiable on (0, inf).
  bool smooth() const;
  // Additive gauge removed at construction.
  double gauge() const { return gauge_; }
  // Values attained by f' on (0, inf), closure at 0 included where finite.
  Interval fprime_range() const;
  // Points where f* is finite.
  Interval conjugate_domain() const;

  // f(x) for x >= 0; throws DomainError for negative x.
  Extended Value(double x) const;
  // f'(x) for x >= 0 (x = 0 gives the right limit). Smooth generators only.
  Extended Prime(double x) const;
  // f''(x) for x > 0. Smooth generators only.
  double SecondDerivative(double x) const;
  // Smallest x >= 0 with f'(x) = y; 0 when y lies below the range. Throws
  // SaturationError carrying sup(range) when y is at or above it.
  double PrimeInverse(double y) const;
  // Convex conjugate f*(y) = sup_{x >= 0} { x y - f(x) }.
  Extended Conjugate(double y) const;
  // lim_{y -> -inf} f*(y) = -f(0).
  Extended ConjugateAtMinusInfinity() const;
  // x f'(x), with its limit at x = 0.
  Extended XPrime(double x) const;
  // lim_{x -> inf} f(x) / x; governs q > 0 against p = 0 in divergences.
  Extended RecessionSlope() const;

 private:
  Generator(GeneratorId id, double gamma);

  Extended RawValue(double x) const;
  Extended RawPrime(double x) const;
  Extended RawConjugate(double y) const;

  GeneratorId id_;
  double gamma_ = 0.0;
  double gauge_ = 0.0;
};

// Throws UnsupportedOperation unless gen.smooth().
void RequireSmooth(const Generator& gen, std::string_view operation);

}  // namespace brh

#endif  // BRH_GENERATORS_HPP_
