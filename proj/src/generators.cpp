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

#include "brh/generators.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "brh/errors.hpp"

namespace brh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kHalfLn2 = 0.5 * std::numbers::ln2;

struct CatalogEntry {
  GeneratorId id;
  const char* name;
  bool smooth;
};

constexpr std::array<CatalogEntry, 9> kCatalog = {{
    {GeneratorId::kKl, "kl", true},
    {GeneratorId::kPearsonChi2, "pearson_chi2", true},
    {GeneratorId::kSqHellinger, "sq_hellinger", true},
    {GeneratorId::kReverseKl, "reverse_kl", true},
    {GeneratorId::kNeymanChi2, "neyman_chi2", true},
    {GeneratorId::kTotalVariation, "total_variation", false},
    {GeneratorId::kJensenShannon, "jensen_shannon", true},
    {GeneratorId::kTriangular, "triangular", true},
    {GeneratorId::kHockeyStick, "hockey_stick", false},
}};

const CatalogEntry& Entry(GeneratorId id) {
  for (const auto& e : kCatalog) {
    if (e.id == id) return e;
  }
  throw DomainError("unknown generator id");
}

// Range of the textbook f' and domain of the textbook f*, before the gauge
// shift.
Interval RawPrimeRange(GeneratorId id) {
  switch (id) {
    case GeneratorId::kKl: return {-kInf, kInf, false, false};
    case GeneratorId::kPearsonChi2: return {-2.0, kInf, true, false};
    case GeneratorId::kSqHellinger: return {-kInf, 1.0, false, false};
    case GeneratorId::kReverseKl: return {-kInf, 0.0, false, false};
    case GeneratorId::kNeymanChi2: return {-kInf, 1.0, false, false};
    case GeneratorId::kJensenShannon: return {-kInf, kHalfLn2, false, false};
    case GeneratorId::kTriangular: return {-1.5, 0.5, true, false};
    default: throw UnsupportedOperation("f' range of a non-smooth generator");
  }
}

Interval RawConjugateDomain(GeneratorId id) {
  switch (id) {
    case GeneratorId::kKl:
    case GeneratorId::kPearsonChi2: return {-kInf, kInf, false, false};
    case GeneratorId::kSqHellinger: return {-kInf, 1.0, false, false};
    case GeneratorId::kReverseKl: return {-kInf, 0.0, false, false};
    case GeneratorId::kNeymanChi2: return {-kInf, 1.0, false, true};
    case GeneratorId::kTotalVariation: return {-kInf, 0.5, false, true};
    case GeneratorId::kJensenShannon: return {-kInf, kHalfLn2, false, false};
    case GeneratorId::kTriangular: return {-kInf, 0.5, false, true};
    case GeneratorId::kHockeyStick: return {-kInf, 1.0, false, true};
  }
  return {-kInf, kInf, false, false};
}

Interval Shift(Interval iv, double by) {
  iv.lo -= by;
  iv.hi -= by;
  return iv;
}

}  // namespace

Generator::Generator(GeneratorId id, double gamma) : id_(id), gamma_(gamma) {
  // f is differentiable at 1 for every catalog entry except total variation
  // (hockey-stick kinks at gamma > 1).
  if (id_ != GeneratorId::kTotalVariation) gauge_ = RawPrime(1.0).value();
}

Generator Generator::Make(GeneratorId id, std::optional<double> gamma) {
  if (id == GeneratorId::kHockeyStick) {
    if (!gamma) throw ConfigError("hockey_stick requires a gamma parameter (> 1)");
    if (!(*gamma > 1.0) || !std::isfinite(*gamma)) {
      throw ConfigError("hockey_stick gamma must be a finite value > 1");
    }
    return Generator(id, *gamma);
  }
  if (gamma) throw ConfigError("gamma is only accepted by hockey_stick");
  return Generator(id, 0.0);
}

const std::vector<std::string>& Generator::ValidNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& e : kCatalog) out.emplace_back(e.name);
    return out;
  }();
  return names;
}

Generator Generator::Parse(std::string_view name, std::optional<double> gamma) {
  for (const auto& e : kCatalog) {
    if (name == e.name) return Make(e.id, gamma);
  }
  std::string msg = "unknown generator '" + std::string(name) + "'; valid ids:";
  for (const auto& n : ValidNames()) msg += " " + n;
  throw ConfigError(msg);
}

std::string Generator::name() const { return Entry(id_).name; }

bool Generator::smooth() const { return Entry(id_).smooth; }

Interval Generator::fprime_range() const { return Shift(RawPrimeRange(id_), gauge_); }

Interval Generator::conjugate_domain() const {
  return Shift(RawConjugateDomain(id_), gauge_);
}

void RequireSmooth(const Generator& gen, std::string_view operation) {
  if (!gen.smooth()) {
    throw UnsupportedOperation(std::string(operation) + " is not defined for the non-smooth generator " +
                               gen.name());
  }
}

Extended Generator::RawValue(double x) const {
  switch (id_) {
    case GeneratorId::kKl:
      return x == 0.0 ? 0.0 : x * std::log(x);
    case GeneratorId::kPearsonChi2:
      return (x - 1.0) * (x - 1.0);
    case GeneratorId::kSqHellinger: {
      const double d = std::sqrt(x) - 1.0;
      return d * d;
    }
    case GeneratorId::kReverseKl:
      return x == 0.0 ? Extended::PosInf() : Extended(-std::log(x));
    case GeneratorId::kNeymanChi2:
      return x == 0.0 ? Extended::PosInf() : Extended((x - 1.0) * (x - 1.0) / x);
    case GeneratorId::kTotalVariation:
      return 0.5 * std::abs(x - 1.0);
    case GeneratorId::kJensenShannon: {
      const double head = x == 0.0 ? 0.0 : 0.5 * x * std::log(2.0 * x / (1.0 + x));
      return head + 0.5 * std::log(2.0 / (1.0 + x));
    }
    case GeneratorId::kTriangular:
      return (x - 1.0) * (x - 1.0) / (2.0 * (x + 1.0));
    case GeneratorId::kHockeyStick:
      return x > gamma_ ? x - gamma_ : 0.0;
  }
  return 0.0;
}

Extended Generator::RawPrime(double x) const {
  switch (id_) {
    case GeneratorId::kKl:
      return x == 0.0 ? Extended::NegInf() : Extended(std::log(x) + 1.0);
    case GeneratorId::kPearsonChi2:
      return 2.0 * (x - 1.0);
    case GeneratorId::kSqHellinger:
      return x == 0.0 ? Extended::NegInf() : Extended(1.0 - 1.0 / std::sqrt(x));
    case GeneratorId::kReverseKl:
      return x == 0.0 ? Extended::NegInf() : Extended(-1.0 / x);
    case GeneratorId::kNeymanChi2:
      return x == 0.0 ? Extended::NegInf() : Extended(1.0 - 1.0 / (x * x));
    case GeneratorId::kJensenShannon:
      return x == 0.0 ? Extended::NegInf() : Extended(0.5 * std::log(2.0 * x / (1.0 + x)));
    case GeneratorId::kTriangular:
      return (x - 1.0) * (x + 3.0) / (2.0 * (x + 1.0) * (x + 1.0));
    case GeneratorId::kHockeyStick:
      // Differentiable away from the kink; used only for the gauge at x = 1.
      if (x == gamma_) throw UnsupportedOperation("hockey_stick f' at its kink");
      return x > gamma_ ? 1.0 : 0.0;
    case GeneratorId::kTotalVariation:
      break;
  }
  throw UnsupportedOperation("f' of total_variation");
}

Extended Generator::RawConjugate(double y) const {
  if (!RawConjugateDomain(id_).Contains(y)) return Extended::PosInf();
  switch (id_) {
    case GeneratorId::kKl:
      return std::exp(y - 1.0);
    case GeneratorId::kPearsonChi2:
      return y >= -2.0 ? y + 0.25 * y * y : -1.0;
    case GeneratorId::kSqHellinger:
      return y / (1.0 - y);
    case GeneratorId::kReverseKl:
      return -1.0 - std::log(-y);
    case GeneratorId::kNeymanChi2:
      return 2.0 - 2.0 * std::sqrt(1.0 - y);
    case GeneratorId::kTotalVariation:
      return y < -0.5 ? -0.5 : y;
    case GeneratorId::kJensenShannon:
      return -0.5 * std::log(2.0 - std::exp(2.0 * y));
    case GeneratorId::kTriangular: {
      if (y < -1.5) return -0.5;
      const double u = std::sqrt(1.0 - 2.0 * y);
      return 0.5 * (1.0 - u) * (3.0 - u);
    }
    case GeneratorId::kHockeyStick:
      return y > 0.0 ? gamma_ * y : 0.0;
  }
  return Extended::PosInf();
}

Extended Generator::Value(double x) const {
  if (!(x >= 0.0)) throw DomainError("f_value: x must be >= 0");
  if (std::isinf(x)) throw DomainError("f_value: x must be finite");
  if (id_ == GeneratorId::kKl) {
    // x log x - x + 1 without the catastrophic shift at x = 0.
    return x == 0.0 ? 1.0 : x * std::log(x) - x + 1.0;
  }
  return RawValue(x) + Extended(-gauge_ * (x - 1.0));
}

Extended Generator::Prime(double x) const {
  RequireSmooth(*this, "f_prime");
  if (!(x >= 0.0)) throw DomainError("f_prime: x must be >= 0");
  if (id_ == GeneratorId::kKl) return x == 0.0 ? Extended::NegInf() : Extended(std::log(x));
  return RawPrime(x) + Extended(-gauge_);
}

double Generator::SecondDerivative(double x) const {
  RequireSmooth(*this, "f''");
  if (!(x > 0.0)) throw DomainError("f'': x must be > 0");
  switch (id_) {
    case GeneratorId::kKl: return 1.0 / x;
    case GeneratorId::kPearsonChi2: return 2.0;
    case GeneratorId::kSqHellinger: return 0.5 / (x * std::sqrt(x));
    case GeneratorId::kReverseKl: return 1.0 / (x * x);
    case GeneratorId::kNeymanChi2: return 2.0 / (x * x * x);
    case GeneratorId::kJensenShannon: return 0.5 / (x * (1.0 + x));
    case GeneratorId::kTriangular: {
      const double d = x + 1.0;
      return 4.0 / (d * d * d);
    }
    default: break;
  }
  throw UnsupportedOperation("f''");
}

double Generator::PrimeInverse(double y) const {
  RequireSmooth(*this, "f_prime_inverse");
  if (std::isnan(y)) throw DomainError("f_prime_inverse: NaN argument");
  const Interval range = fprime_range();
  if (y < range.lo || (y == range.lo && !range.lo_closed && std::isfinite(range.lo))) return 0.0;
  if (y > range.hi || (y == range.hi && !range.hi_closed)) {
    throw SaturationError("f_prime_inverse: y at or above the attainable range of f' for " + name(),
                          range.hi);
  }
  const double z = y + gauge_;  // textbook coordinate
  switch (id_) {
    case GeneratorId::kKl:
      return std::exp(y);
    case GeneratorId::kPearsonChi2:
      return z >= -2.0 ? 1.0 + 0.5 * z : 0.0;
    case GeneratorId::kSqHellinger: {
      const double d = 1.0 - z;
      return 1.0 / (d * d);
    }
    case GeneratorId::kReverseKl:
      return -1.0 / z;
    case GeneratorId::kNeymanChi2:
      return 1.0 / std::sqrt(1.0 - z);
    case GeneratorId::kJensenShannon: {
      const double w = std::exp(2.0 * z);
      return w / (2.0 - w);
    }
    case GeneratorId::kTriangular:
      return z < -1.5 ? 0.0 : -1.0 + 2.0 / std::sqrt(1.0 - 2.0 * z);
    default:
      break;
  }
  throw UnsupportedOperation("f_prime_inverse");
}

Extended Generator::Conjugate(double y) const {
  if (std::isnan(y)) throw DomainError("f_conjugate: NaN argument");
  if (std::isinf(y)) {
    if (y < 0.0) return ConjugateAtMinusInfinity();
    return Extended::PosInf();
  }
  if (!conjugate_domain().Contains(y)) return Extended::PosInf();
  switch (id_) {
    case GeneratorId::kKl:
      return std::expm1(y);
    case GeneratorId::kReverseKl:
      return -std::log1p(-y);
    default:
      break;
  }
  // f*_canonical(y) = f*_raw(y + c) - c.
  return RawConjugate(y + gauge_) + Extended(-gauge_);
}

Extended Generator::ConjugateAtMinusInfinity() const { return -Value(0.0); }

Extended Generator::XPrime(double x) const {
  RequireSmooth(*this, "x f'(x)");
  if (!(x >= 0.0)) throw DomainError("x f'(x): x must be >= 0");
  if (x > 0.0) return x * Prime(x);
  switch (id_) {
    case GeneratorId::kReverseKl: return -1.0;
    case GeneratorId::kNeymanChi2: return Extended::NegInf();
    default: return 0.0;
  }
}

Extended Generator::RecessionSlope() const {
  Extended raw;
  switch (id_) {
    case GeneratorId::kKl:
    case GeneratorId::kPearsonChi2: return Extended::PosInf();
    case GeneratorId::kSqHellinger: raw = 1.0; break;
    case GeneratorId::kReverseKl: raw = 0.0; break;
    case GeneratorId::kNeymanChi2: raw = 1.0; break;
    case GeneratorId::kTotalVariation: raw = 0.5; break;
    case GeneratorId::kJensenShannon: raw = kHalfLn2; break;
    case GeneratorId::kTriangular: raw = 0.5; break;
    case GeneratorId::kHockeyStick: raw = 1.0; break;
  }
  return raw + Extended(-gauge_);
}

}  // namespace brh
