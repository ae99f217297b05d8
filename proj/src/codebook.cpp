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
#include <limits>
#include <random>

#include "brh/errors.hpp"
#include "brh/learning.hpp"
#include "brh/numeric.hpp"

namespace brh {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<std::vector<double>> SeedPlusPlus(const std::vector<std::vector<double>>& pts,
                                              std::size_t k, std::mt19937_64& rng) {
  std::vector<std::vector<double>> codes;
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
  codes.push_back(pts[pick(rng)]);
  std::vector<double> d2(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d2[i] = SquaredDistance(pts[i], codes[0]);
  while (codes.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t next = 0;
    if (total <= 0.0) {
      next = pick(rng);
    } else {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (next = 0; next + 1 < pts.size(); ++next) {
        u -= d2[next];
        if (u < 0.0) break;
      }
    }
    codes.push_back(pts[next]);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d2[i] = std::min(d2[i], SquaredDistance(pts[i], codes.back()));
    }
  }
  return codes;
}

std::size_t Nearest(std::span<const double> p, const std::vector<std::vector<double>>& codes) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < codes.size(); ++c) {
    const double d = SquaredDistance(p, codes[c]);
    if (d < bd) {
      bd = d;
      best = c;
    }
  }
  return best;
}

bool HasDuplicates(const std::vector<std::vector<double>>& codes) {
  for (std::size_t a = 0; a < codes.size(); ++a) {
    for (std::size_t b = a + 1; b < codes.size(); ++b) {
      if (codes[a] == codes[b]) return true;
    }
  }
  return false;
}

// Returns false on an empty cluster or duplicate codes.
bool Lloyd(const std::vector<std::vector<double>>& pts, Codebook& book) {
  const std::size_t k = book.codes.size();
  const std::size_t dim = pts.front().size();
  std::vector<std::size_t> assign(pts.size(), k);
  book.objective_trace.clear();
  book.iterations = 0;
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const std::size_t c = Nearest(pts[i], book.codes);
      if (c != assign[i]) changed = true;
      assign[i] = c;
    }
    if (!changed && it > 0) break;
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ++counts[assign[i]];
      for (std::size_t d = 0; d < dim; ++d) sums[assign[i]][d] += pts[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) return false;
      for (std::size_t d = 0; d < dim; ++d) book.codes[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
    double obj = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) obj += SquaredDistance(pts[i], book.codes[assign[i]]);
    book.objective_trace.push_back(obj);
    book.iterations = it + 1;
  }
  return !HasDuplicates(book.codes);
}

}  // namespace

double MedianPairwiseDistance(const std::vector<std::vector<double>>& codes) {
  if (codes.size() < 2) throw DomainError("median pairwise distance: need at least two codes");
  std::vector<double> d;
  d.reserve(codes.size() * (codes.size() - 1) / 2);
  for (std::size_t a = 0; a < codes.size(); ++a) {
    for (std::size_t b = a + 1; b < codes.size(); ++b) d.push_back(std::sqrt(SquaredDistance(codes[a], codes[b])));
  }
  const std::size_t mid = d.size() / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  if (d.size() % 2 == 1) return d[mid];
  const double hi = d[mid];
  const double lo = *std::max_element(d.begin(), d.begin() + mid);
  return 0.5 * (lo + hi);
}

Codebook BuildCodebook(const std::vector<std::vector<double>>& pilots, std::size_t k,
                       std::uint64_t seed) {
  if (k < 2) throw ConfigError("codebook: k must be >= 2");
  if (pilots.size() < k) throw ConfigError("codebook: fewer pilot points than codes");
  const std::size_t dim = pilots.front().size();
  for (const auto& p : pilots) {
    if (p.size() != dim) throw DomainError("codebook: ragged pilot points");
  }
  std::mt19937_64 rng(seed);
  Codebook book;
  for (int attempt = 0; attempt < 2; ++attempt) {
    book.codes = SeedPlusPlus(pilots, k, rng);
    if (Lloyd(pilots, book)) {
      book.temperature = MedianPairwiseDistance(book.codes) / std::sqrt(2.0);
      if (!(book.temperature > 0.0)) break;
      return book;
    }
  }
  throw NumericFailure("codebook: clusters collapsed after reseeding (too few distinct pilot points?)");
}

std::vector<double> SoftAssign(std::span<const double> prediction, const Codebook& codebook) {
  const std::size_t k = codebook.codes.size();
  std::vector<double> logits(k);
  const double scale = 1.0 / (2.0 * codebook.temperature * codebook.temperature);
  for (std::size_t c = 0; c < k; ++c) {
    if (codebook.codes[c].size() != prediction.size()) throw DomainError("soft assign: dimension mismatch");
    logits[c] = -SquaredDistance(prediction, codebook.codes[c]) * scale;
  }
  const double lse = LogSumExp(logits);
  std::vector<double> w(k, 0.0);
  if (!std::isfinite(lse)) {
    w[Nearest(prediction, codebook.codes)] = 1.0;
    return w;
  }
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    w[c] = std::exp(logits[c] - lse);
    total += w[c];
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace brh
