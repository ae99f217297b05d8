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

#ifndef BRH_NUMERIC_HPP_
#define BRH_NUMERIC_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace brh {

// Root of an increasing function on [lo, hi] with g(lo) <= 0 <= g(hi).
// Stops when the bracket no longer shrinks in floating point.
template <typename F>
double BisectIncreasing(F&& g, double lo, double hi, int max_iters = 200) {
  for (int i = 0; i < max_iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline double LogSumExp(std::span<const double> v) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : v) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - mx);
  return mx + std::log(acc);
}

// n points from lo to hi, geometrically spaced; lo when n == 1.
inline std::vector<double> GeometricGrid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n <= 0) return g;
  if (n == 1) return {lo};
  const double ratio = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g.push_back(i == n - 1 ? hi : lo * std::exp(ratio * i));
  return g;
}

// SplitMix64 finalizer; used to derive independent stage seeds from one
// master seed.
inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t stage, std::uint64_t index = 0) {
  return SplitMix64(SplitMix64(SplitMix64(master) ^ stage) ^ index);
}

}  // namespace brh

#endif  // BRH_NUMERIC_HPP_
