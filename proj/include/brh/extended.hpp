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

#ifndef BRH_EXTENDED_HPP_
#define BRH_EXTENDED_HPP_

#include <cmath>
#include <limits>
#include <ostream>

#include "brh/errors.hpp"

namespace brh {

// A real number or one of the two infinities. Arithmetic that would produce
// an indeterminate form (inf - inf, 0 * inf) throws instead of yielding NaN.
class Extended {
 public:
  enum class Kind { kFinite, kPosInf, kNegInf };

  constexpr Extended() = default;
  // Accepts +-inf; rejects NaN.
  Extended(double v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw DomainError("Extended: NaN is not an extended real");
    if (v == std::numeric_limits<double>::infinity()) {
      kind_ = Kind::kPosInf;
    } else if (v == -std::numeric_limits<double>::infinity()) {
      kind_ = Kind::kNegInf;
    } else {
      value_ = v;
    }
  }

  static Extended PosInf() { return Extended(Kind::kPosInf); }
  static Extended NegInf() { return Extended(Kind::kNegInf); }

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::kFinite; }
  bool pos_inf() const { return kind_ == Kind::kPosInf; }
  bool neg_inf() const { return kind_ == Kind::kNegInf; }

  // Finite value; throws on infinities.
  double value() const {
    if (!finite()) throw DomainError("Extended::value: value is infinite");
    return value_;
  }
  // IEEE view (+-inf for infinities).
  double to_double() const {
    switch (kind_) {
      case Kind::kPosInf: return std::numeric_limits<double>::infinity();
      case Kind::kNegInf: return -std::numeric_limits<double>::infinity();
      default: return value_;
    }
  }

  Extended operator-() const {
    switch (kind_) {
      case Kind::kPosInf: return NegInf();
      case Kind::kNegInf: return PosInf();
      default: return Extended(-value_);
    }
  }

  friend Extended operator+(const Extended& a, const Extended& b) {
    if (a.finite() && b.finite()) return Extended(a.value_ + b.value_);
    if ((a.pos_inf() && b.neg_inf()) || (a.neg_inf() && b.pos_inf())) {
      throw DomainError("Extended: inf - inf is indeterminate");
    }
    return a.finite() ? b : a;
  }
  friend Extended operator-(const Extended& a, const Extended& b) { return a + (-b); }

  // Scaling by a finite real. 0 * inf is indeterminate unless the caller
  // declares a zero-mass convention; see ScaleByMass.
  friend Extended operator*(double s, const Extended& a) {
    if (a.finite()) return Extended(s * a.value_);
    if (s == 0.0) throw DomainError("Extended: 0 * inf is indeterminate");
    return (s > 0.0) == a.pos_inf() ? PosInf() : NegInf();
  }
  friend Extended operator*(const Extended& a, double s) { return s * a; }

  Extended& operator+=(const Extended& b) { return *this = *this + b; }

  friend bool operator<(const Extended& a, const Extended& b) {
    return a.to_double() < b.to_double();
  }
  friend bool operator<=(const Extended& a, const Extended& b) {
    return a.to_double() <= b.to_double();
  }
  friend bool operator>(const Extended& a, const Extended& b) { return b < a; }
  friend bool operator>=(const Extended& a, const Extended& b) { return b <= a; }
  friend bool operator==(const Extended& a, const Extended& b) {
    return a.to_double() == b.to_double();
  }

  friend std::ostream& operator<<(std::ostream& os, const Extended& e) {
    return os << e.to_double();
  }

 private:
  explicit constexpr Extended(Kind k) : kind_(k) {}

  Kind kind_ = Kind::kFinite;
  double value_ = 0.0;
};

// Measure-theoretic product: zero mass annihilates infinities.
inline Extended ScaleByMass(double mass, const Extended& e) {
  if (mass == 0.0) return Extended(0.0);
  return mass * e;
}

}  // namespace brh

#endif  // BRH_EXTENDED_HPP_
