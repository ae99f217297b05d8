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

#include "brh/frontier.hpp"

#include <cmath>
#include <cstring>

#include "brh/errors.hpp"
#include "brh/hedge.hpp"

namespace brh {
namespace {

OperatingPoint MakePoint(const Generator& gen, const DiscreteProblem& problem, double beta,
                         const SolveReport& rep, bool keep_channel) {
  OperatingPoint pt;
  pt.beta = beta;
  pt.solved = true;
  pt.loss = ExpectedLoss(problem, rep.channel);
  pt.info_native = FMutualInformation(gen, problem.prior, rep.channel).to_double();
  pt.certificate = Certificate(gen, problem, rep.channel, beta);
  pt.iters = rep.iters;
  pt.residual = rep.residual;
  if (!rep.converged) pt.flags.push_back("not_converged");
  if (keep_channel) pt.channel = rep.channel;
  return pt;
}

OperatingPoint FailedPoint(double beta, const std::string& what) {
  OperatingPoint pt;
  pt.beta = beta;
  pt.error = what;
  pt.flags.push_back("solve_failed");
  return pt;
}

void CheckGrid(std::span<const double> grid) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ConfigError("beta grid entries must be > 0");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("beta grid must be ascending");
  }
}

void FlagMonotonicity(FrontierCurve& curve, double tol) {
  const OperatingPoint* prev = nullptr;
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    OperatingPoint& pt = curve.points[i];
    if (!pt.solved) continue;
    if (prev != nullptr &&
        (pt.info_native < prev->info_native - tol || pt.loss > prev->loss + tol)) {
      curve.non_monotone.push_back(i);
      pt.flags.push_back("non_monotone");
    }
    prev = &pt;
  }
}

FrontierCurve NewCurve(const Generator& gen, const DiscreteProblem& problem) {
  FrontierCurve c;
  c.generator = gen.name();
  c.problem_hash = ProblemHash(problem);
  return c;
}

}  // namespace

std::uint64_t ProblemHash(const DiscreteProblem& problem) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t dims[2] = {problem.num_stimuli(), problem.num_actions()};
  mix(dims, sizeof(dims));
  mix(problem.prior.data(), problem.prior.size() * sizeof(double));
  mix(problem.loss.data().data(), problem.loss.data().size() * sizeof(double));
  return h;
}

FrontierCurve TraceSerial(const Generator& gen, const DiscreteProblem& problem,
                          std::span<const double> beta_grid, const TraceConfig& config) {
  CheckGrid(beta_grid);
  FrontierCurve curve = NewCurve(gen, problem);
  std::optional<Channel> warm;
  for (double beta : beta_grid) {
    SolveConfig cfg = config.solve;
    cfg.beta = beta;
    if (warm) {
      cfg.init = InitRule::kWarmStart;
      cfg.warm_start = warm;
    }
    try {
      const SolveReport rep = Solve(gen, problem, cfg);
      warm = rep.channel;
      curve.points.push_back(MakePoint(gen, problem, beta, rep, config.keep_channels));
    } catch (const Error& e) {
      curve.points.push_back(FailedPoint(beta, e.what()));
    }
  }
  FlagMonotonicity(curve, config.monotone_tol);
  return curve;
}

FrontierCurve Trace(const Generator& gen, const DiscreteProblem& problem,
                    std::span<const double> beta_grid, const TraceConfig& config) {
  CheckGrid(beta_grid);
  const std::size_t n = beta_grid.size();
  std::vector<std::optional<Channel>> seeds(n);
  {
    std::optional<Channel> warm;
    for (std::size_t i = 0; i < n; ++i) {
      SolveConfig cfg = config.solve;
      cfg.beta = beta_grid[i];
      cfg.tol = std::max(config.warm_tol, config.solve.tol);
      if (warm) {
        cfg.init = InitRule::kWarmStart;
        cfg.warm_start = warm;
      }
      try {
        warm = Solve(gen, problem, cfg).channel;
        seeds[i] = warm;
      } catch (const Error&) {
        warm.reset();
      }
    }
  }
  FrontierCurve curve = NewCurve(gen, problem);
  curve.points.resize(n);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < n; ++i) {
    SolveConfig cfg = config.solve;
    cfg.beta = beta_grid[i];
    if (seeds[i]) {
      cfg.init = InitRule::kWarmStart;
      cfg.warm_start = seeds[i];
    }
    try {
      const SolveReport rep = Solve(gen, problem, cfg);
      curve.points[i] = MakePoint(gen, problem, beta_grid[i], rep, config.keep_channels);
    } catch (const Error& e) {
      curve.points[i] = FailedPoint(beta_grid[i], e.what());
    }
  }
  FlagMonotonicity(curve, config.monotone_tol);
  return curve;
}

FrontierCurve Project(const FrontierCurve& curve, const Generator& reference,
                      std::span<const double> prior) {
  FrontierCurve out = curve;
  const std::string key = reference.name();
#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    OperatingPoint& pt = out.points[i];
    if (!pt.solved) continue;
    if (!pt.channel) {
      pt.flags.push_back("no_channel");
      continue;
    }
    const Extended info = FMutualInformation(reference, prior, *pt.channel);
    if (!info.finite()) {
      pt.flags.push_back("projection_infinite_" + key);
    }
    pt.info_projected[key] = info.to_double();
  }
  return out;
}

OperatingPoint MatchLoss(const Generator& gen, const DiscreteProblem& problem, double target_loss,
                         double beta_lo, double beta_hi, const SolveConfig& config) {
  auto solve_at = [&](double beta, const std::optional<Channel>& warm) {
    SolveConfig cfg = config;
    cfg.beta = beta;
    if (warm) {
      cfg.init = InitRule::kWarmStart;
      cfg.warm_start = warm;
    }
    return Solve(gen, problem, cfg);
  };
  SolveReport lo = solve_at(beta_lo, std::nullopt);
  SolveReport hi = solve_at(beta_hi, lo.channel);
  double l_lo = ExpectedLoss(problem, lo.channel);
  double l_hi = ExpectedLoss(problem, hi.channel);
  if (target_loss > l_lo || target_loss < l_hi) {
    throw DomainError("match_loss: target loss outside the bracketed range");
  }
  double a = std::log(beta_lo);
  double b = std::log(beta_hi);
  SolveReport best = std::abs(l_lo - target_loss) < std::abs(l_hi - target_loss) ? lo : hi;
  double best_beta = std::abs(l_lo - target_loss) < std::abs(l_hi - target_loss) ? beta_lo : beta_hi;
  double best_gap = std::min(std::abs(l_lo - target_loss), std::abs(l_hi - target_loss));
  for (int it = 0; it < 200 && best_gap > 1e-11; ++it) {
    // Secant on log beta, falling back to bisection near the ends.
    double c = 0.5 * (a + b);
    if (l_lo != l_hi) {
      const double sec = a + (l_lo - target_loss) / (l_lo - l_hi) * (b - a);
      const double w = b - a;
      if (sec > a + 0.05 * w && sec < b - 0.05 * w) c = sec;
    }
    const SolveReport mid = solve_at(std::exp(c), lo.channel);
    const double l_mid = ExpectedLoss(problem, mid.channel);
    if (std::abs(l_mid - target_loss) < best_gap) {
      best_gap = std::abs(l_mid - target_loss);
      best = mid;
      best_beta = std::exp(c);
    }
    if (l_mid > target_loss) {
      a = c;
      l_lo = l_mid;
      lo = mid;
    } else {
      b = c;
      l_hi = l_mid;
    }
    if (b - a < 1e-15) break;
  }
  OperatingPoint pt = MakePoint(gen, problem, best_beta, best, true);
  if (best_gap > 1e-9) pt.flags.push_back("loss_match_inexact");
  return pt;
}

}  // namespace brh
