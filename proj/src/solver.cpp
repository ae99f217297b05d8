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

#include "brh/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "brh/errors.hpp"
#include "brh/hedge.hpp"
#include "brh/numeric.hpp"

namespace brh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Marginal mass below which a shrinking action is tested for removal.
constexpr double kPruneMass = 1e-9;
constexpr int kMaxRevivals = 4;
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-12;

// Problem restricted to stimuli with positive prior.
struct Reduced {
  DiscreteProblem problem;
  std::vector<std::size_t> kept;
};

Reduced Reduce(const DiscreteProblem& p) {
  Reduced r;
  for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
    if (p.prior[s] > 0.0) r.kept.push_back(s);
  }
  r.problem.prior.resize(r.kept.size());
  r.problem.loss = Matrix(r.kept.size(), p.num_actions());
  for (std::size_t i = 0; i < r.kept.size(); ++i) {
    r.problem.prior[i] = p.prior[r.kept[i]];
    for (std::size_t a = 0; a < p.num_actions(); ++a) r.problem.loss(i, a) = p.loss(r.kept[i], a);
  }
  return r;
}

std::vector<double> RawMarginal(std::span<const double> prior, const Matrix& rows) {
  std::vector<double> m(rows.cols(), 0.0);
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    for (std::size_t a = 0; a < rows.cols(); ++a) m[a] += prior[s] * rows(s, a);
  }
  return m;
}

void NormalizeRows(Matrix& rows) {
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    double total = 0.0;
    for (double& v : rows.row(s)) {
      if (v < 0.0) v = 0.0;
      total += v;
    }
    for (double& v : rows.row(s)) v /= total;
  }
}

double Objective(const Generator& gen, const DiscreteProblem& p, const Matrix& rows, double beta) {
  const std::vector<double> m = RawMarginal(p.prior, rows);
  double loss = 0.0;
  Extended info = 0.0;
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    double row_loss = 0.0;
    Extended row_info = 0.0;
    for (std::size_t a = 0; a < rows.cols(); ++a) {
      row_loss += rows(s, a) * p.loss(s, a);
      if (m[a] > 0.0) row_info += m[a] * gen.Value(rows(s, a) / m[a]);
    }
    loss += p.prior[s] * row_loss;
    info += p.prior[s] * row_info;
  }
  return loss + info.to_double() / beta;
}

// Residual evaluated on the reduced problem, with levels for the zero-column
// test.
struct ResidualEval {
  SolveResidual parts;
  std::vector<double> level;
};

ResidualEval Evaluate(const Generator& gen, const DiscreteProblem& p, const Matrix& rows,
                      double beta, const std::vector<char>& pruned) {
  // Renormalized copy so that the Channel invariants hold exactly.
  Matrix clean = rows;
  NormalizeRows(clean);
  const Channel ch(p.prior, std::move(clean));
  const PerturbationTable table = OptimalPerturbation(gen, p, ch, beta);
  const IndifferenceReport rep = IndifferenceResidual(p, ch, table.values);
  ResidualEval out;
  out.parts.on_support = rep.max_on_support;
  out.parts.off_support = rep.max_off_support;
  out.level = rep.level;
  if (gen.Prime(0.0).neg_inf()) {
    // An unused entry in a used action has effective loss -inf, unless its
    // best response underflows anyway.
    const std::vector<double> g = MarginalCorrection(gen, p.prior, ch);
    for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
      for (std::size_t a = 0; a < p.num_actions(); ++a) {
        if (ch(s, a) != 0.0 || ch.marginal()[a] <= 0.0) continue;
        const double z = beta * (rep.level[s] - p.loss(s, a)) - g[a];
        const double sat = gen.fprime_range().hi;
        const double target = z >= sat ? kInf : ch.marginal()[a] * gen.PrimeInverse(z);
        if (target > 1e-300) out.parts.off_support = kInf;
      }
    }
  }
  std::vector<double> col(p.num_stimuli());
  for (std::size_t a = 0; a < p.num_actions(); ++a) {
    if (ch.marginal()[a] > 0.0 && !pruned[a]) continue;
    for (std::size_t s = 0; s < p.num_stimuli(); ++s) col[s] = p.loss(s, a);
    out.parts.zero_column =
        std::max(out.parts.zero_column, ZeroColumnSlack(gen, p.prior, col, rep.level, beta));
  }
  return out;
}

// Removes shrinking actions whose unused-action test already passes and
// revives removed actions whose test fails. Returns true if the support
// changed.
bool UpdateSupport(const Generator& gen, const DiscreteProblem& p, Matrix& rows, double beta,
                   double tol, const std::vector<double>& prev_marginal, std::vector<char>& pruned,
                   std::vector<int>& revivals, const std::vector<double>& level) {
  const std::vector<double> m = RawMarginal(p.prior, rows);
  bool changed = false;
  std::vector<double> col(p.num_stimuli());
  std::size_t alive = 0;
  for (std::size_t a = 0; a < m.size(); ++a) alive += m[a] > 0.0 ? 1 : 0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (std::size_t s = 0; s < p.num_stimuli(); ++s) col[s] = p.loss(s, a);
    if (m[a] > 0.0) {
      const double floor = revivals[a] >= kMaxRevivals ? 1e-15 : kPruneMass;
      if (alive <= 1 || m[a] >= floor || m[a] >= prev_marginal[a]) continue;
      if (ZeroColumnSlack(gen, p.prior, col, level, beta) >= 0.0) continue;
      for (std::size_t s = 0; s < p.num_stimuli(); ++s) rows(s, a) = 0.0;
      pruned[a] = 1;
      --alive;
      changed = true;
    } else if (revivals[a] < kMaxRevivals &&
               ZeroColumnSlack(gen, p.prior, col, level, beta) > tol) {
      for (std::size_t s = 0; s < p.num_stimuli(); ++s) rows(s, a) = 1e-6;
      pruned[a] = 0;
      ++revivals[a];
      changed = true;
    }
  }
  if (changed) NormalizeRows(rows);
  return changed;
}

// Largest stationarity system handed to the dense Newton polish.
constexpr std::size_t kMaxPolishVars = 600;

// Active-set Newton on the indifference system restricted to a support:
// l(s,a) + (f'(r) + G(a)) / beta = lambda_s on the support, rows sum to 1.
// Entries the Newton step pushes through zero leave the support (the whole
// action when f'(0) = -inf); off-support entries and unused actions that fail
// their optimality test rejoin it. Returns rows satisfying all conditions to
// within tol, or nothing.
std::optional<Matrix> NewtonPolish(const Generator& gen, const DiscreteProblem& p,
                                   const Matrix& start, double beta, double tol) {
  const std::size_t ns = p.num_stimuli();
  const std::size_t na = p.num_actions();
  const bool hard_zero = gen.Prime(0.0).neg_inf();
  const std::vector<double> m0 = RawMarginal(p.prior, start);
  std::vector<char> on(ns * na, 0);
  for (std::size_t a = 0; a < na; ++a) {
    if (m0[a] <= 1e-8) continue;
    for (std::size_t s = 0; s < ns; ++s) {
      if (hard_zero || start(s, a) > 1e-10) on[s * na + a] = 1;
    }
  }
  Matrix q = start;
  std::vector<char> fresh(ns * na, 0);
  auto drop = [&](std::size_t k) {
    if (hard_zero) {
      for (std::size_t s = 0; s < ns; ++s) on[s * na + k % na] = 0;
    } else {
      on[k] = 0;
    }
  };
  auto mask = [&] {
    for (std::size_t k = 0; k < on.size(); ++k) {
      if (!on[k]) q.data()[k] = 0.0;
    }
  };
  double max_loss = 0.0;
  for (double v : p.loss.data()) max_loss = std::max(max_loss, std::abs(v));

  std::vector<double> m(na), g(na), tsum(na);
  Matrix fp(ns, na), fpp(ns, na);
  std::vector<std::size_t> var;
  const double f0 = hard_zero ? 0.0 : gen.Value(0.0).to_double();
  // Stationarity residuals at (qq, lam); false if some ratio is not positive.
  auto residual = [&](const Matrix& qq, const std::vector<double>& lam, Eigen::VectorXd& e) {
    const std::size_t nq = var.size();
    m = RawMarginal(p.prior, qq);
    std::fill(g.begin(), g.end(), 0.0);
    std::fill(tsum.begin(), tsum.end(), 0.0);
    for (std::size_t k : var) {
      const std::size_t s = k / na, a = k % na;
      const double r = qq(s, a) / m[a];
      if (!(r > 0.0) || !std::isfinite(r)) return false;
      fp(s, a) = gen.Prime(r).to_double();
      fpp(s, a) = gen.SecondDerivative(r);
      g[a] += p.prior[s] * (gen.Value(r).to_double() - r * fp(s, a));
      tsum[a] += p.prior[s] * r * r * fpp(s, a);
    }
    if (!hard_zero) {
      for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t s = 0; s < ns; ++s) {
          if (!on[s * na + a]) g[a] += p.prior[s] * f0;
        }
      }
    }
    e.resize(static_cast<Eigen::Index>(nq + ns));
    for (std::size_t i = 0; i < nq; ++i) {
      const std::size_t s = var[i] / na, a = var[i] % na;
      e[static_cast<Eigen::Index>(i)] = p.loss(s, a) + (fp(s, a) + g[a]) / beta - lam[s];
    }
    for (std::size_t s = 0; s < ns; ++s) {
      double t = -1.0;
      for (std::size_t a = 0; a < na; ++a) t += qq(s, a);
      e[static_cast<Eigen::Index>(nq + s)] = t;
    }
    return e.allFinite();
  };

  int budget = static_cast<int>(4 * ns * na) + 8;
  while (budget-- > 0) {
    mask();
    var.clear();
    for (std::size_t k = 0; k < on.size(); ++k) {
      if (on[k]) var.push_back(k);
    }
    const std::size_t nq = var.size();
    const std::size_t nv = nq + ns;
    if (nv > kMaxPolishVars) return std::nullopt;
    for (std::size_t s = 0; s < ns; ++s) {
      double t = 0.0;
      for (std::size_t a = 0; a < na; ++a) t += q(s, a);
      if (!(t > 0.0)) return std::nullopt;
      for (std::size_t a = 0; a < na; ++a) q(s, a) /= t;
    }
    std::vector<double> lambda(ns, 0.0);
    Eigen::VectorXd e;
    if (!residual(q, lambda, e)) return std::nullopt;
    {
      std::vector<double> cnt(ns, 0.0);
      for (std::size_t i = 0; i < nq; ++i) {
        lambda[var[i] / na] += e[static_cast<Eigen::Index>(i)];
        cnt[var[i] / na] += 1.0;
      }
      for (std::size_t s = 0; s < ns; ++s) lambda[s] /= cnt[s];
    }
    residual(q, lambda, e);
    bool restart = false;
    bool solved = false;
    for (int it = 0; it < 100; ++it) {
      double scale = 1.0 + max_loss;
      for (double l : lambda) scale = std::max(scale, std::abs(l));
      const double norm = e.lpNorm<Eigen::Infinity>();
      if (norm <= std::max(1e-14 * scale, 1e-3 * tol)) {
        solved = true;
        break;
      }
      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nv),
                                                  static_cast<Eigen::Index>(nv));
      for (std::size_t i = 0; i < nq; ++i) {
        const std::size_t s = var[i] / na, a = var[i] % na;
        const double r = q(s, a) / m[a];
        for (std::size_t j = 0; j < nq; ++j) {
          const std::size_t s2 = var[j] / na;
          if (var[j] % na != a) continue;
          const double r2 = q(s2, a) / m[a];
          double d = fpp(s, a) * ((s == s2 ? 1.0 : 0.0) - r * p.prior[s2]) / m[a];
          d += p.prior[s2] / m[a] * (tsum[a] - r2 * fpp(s2, a));
          jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d / beta;
        }
        jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nq + s)) = -1.0;
        jac(static_cast<Eigen::Index>(nq + s), static_cast<Eigen::Index>(i)) = 1.0;
      }
      const Eigen::VectorXd delta = jac.partialPivLu().solve(-e);
      if (!delta.allFinite()) return std::nullopt;
      double alpha_max = 1.0;
      std::size_t blocking = nq;
      for (std::size_t i = 0; i < nq; ++i) {
        const double dq = delta[static_cast<Eigen::Index>(i)];
        const double qi = q.data()[var[i]];
        if (dq < 0.0 && qi + dq <= 0.0 && -qi / dq < alpha_max) {
          alpha_max = -qi / dq;
          blocking = i;
        }
      }
      auto release = [&] {
        // Move to the boundary and release the blocking entry.
        for (std::size_t i = 0; i < nq; ++i) {
          q.data()[var[i]] += alpha_max * delta[static_cast<Eigen::Index>(i)];
        }
        drop(var[blocking]);
        restart = true;
      };
      double alpha = 1.0;
      if (blocking < nq) {
        // Entries this polish re-added get interior steps until negligible;
        // their first Newton steps are unreliable.
        const std::size_t k = var[blocking];
        const bool negligible = hard_zero ? m[k % na] < 1e-12 : q.data()[k] < 1e-13;
        if (!fresh[k] || negligible) {
          release();
          break;
        }
        alpha = 0.95 * alpha_max;
      }
      bool accepted = false;
      const double f_cur = Objective(gen, p, q, beta);
      Matrix trial;
      std::vector<double> lam_trial(ns);
      Eigen::VectorXd e_trial;
      for (int bt = 0; bt < 40; ++bt, alpha *= 0.5) {
        trial = q;
        for (std::size_t i = 0; i < nq; ++i) {
          trial.data()[var[i]] += alpha * delta[static_cast<Eigen::Index>(i)];
        }
        for (std::size_t s = 0; s < ns; ++s) {
          lam_trial[s] = lambda[s] + alpha * delta[static_cast<Eigen::Index>(nq + s)];
        }
        // The Newton step descends on the free energy, which is the robust
        // merit far from the solution; the residual decides near it.
        if (residual(trial, lam_trial, e_trial) &&
            (Objective(gen, p, trial, beta) < f_cur - 1e-14 * std::max(1.0, std::abs(f_cur)) ||
             e_trial.norm() < (1.0 - 1e-4 * alpha) * e.norm())) {
          accepted = true;
          break;
        }
      }
      if (!accepted) {
        if (blocking < nq) {
          residual(q, lambda, e);
          release();
          break;
        }
        residual(q, lambda, e);
        solved = norm <= 0.1 * tol;
        break;
      }
      q = std::move(trial);
      lambda = lam_trial;
      e = e_trial;
    }
    if (restart) continue;
    if (!solved) return std::nullopt;

    // Optimality of everything left out of the support.
    mask();
    double worst = 0.5 * tol;
    std::size_t add = on.size();
    bool add_column = false;
    std::vector<double> col(ns);
    for (std::size_t a = 0; a < na; ++a) {
      if (m[a] > 0.0) {
        if (hard_zero) continue;
        for (std::size_t s = 0; s < ns; ++s) {
          if (on[s * na + a]) continue;
          const double eff = p.loss(s, a) + (gen.Prime(0.0).to_double() + g[a]) / beta;
          if (lambda[s] - eff > worst) {
            worst = lambda[s] - eff;
            add = s * na + a;
            add_column = false;
          }
        }
      } else {
        for (std::size_t s = 0; s < ns; ++s) col[s] = p.loss(s, a);
        const double slack = ZeroColumnSlack(gen, p.prior, col, lambda, beta);
        if (slack > worst) {
          worst = slack;
          add = a;
          add_column = true;
        }
      }
    }
    if (add == on.size()) return q;
    if (add_column) {
      // Seeded with the Gibbs shape of the column's best response.
      double z = 0.0;
      for (std::size_t s = 0; s < ns; ++s) {
        col[s] = std::exp(std::min(beta * (lambda[s] - p.loss(s, add)), 50.0));
        z += p.prior[s] * col[s];
      }
      for (std::size_t s = 0; s < ns; ++s) {
        on[s * na + add] = 1;
        fresh[s * na + add] = 1;
        q(s, add) = 1e-4 * col[s] / z;
      }
    } else {
      on[add] = 1;
      fresh[add] = 1;
      q.data()[add] = 1e-6;
    }
  }
  return std::nullopt;
}

Matrix InitialRows(const Generator& gen, const DiscreteProblem& p, const SolveConfig& cfg,
                   const Reduced& red, const DiscreteProblem& full) {
  const std::size_t ns = p.num_stimuli();
  const std::size_t na = p.num_actions();
  Matrix rows(ns, na, 1.0 / static_cast<double>(na));
  switch (cfg.init) {
    case InitRule::kUniform:
      break;
    case InitRule::kMarginalSeed: {
      const std::vector<double> uniform(na, 1.0 / static_cast<double>(na));
      for (std::size_t s = 0; s < ns; ++s) {
        const auto q = PerStimulusResponse(gen, uniform, p.loss.row(s), cfg.beta);
        std::copy(q.begin(), q.end(), rows.row(s).begin());
      }
      // Strictly interior start keeps every action available.
      for (double& v : rows.data()) v = 0.5 * v + 0.5 / static_cast<double>(na);
      break;
    }
    case InitRule::kWarmStart: {
      if (!cfg.warm_start) throw ConfigError("init warm_start requires a channel");
      const Matrix& w = cfg.warm_start->rows();
      if (w.rows() != full.num_stimuli() || w.cols() != na) {
        throw ConfigError("warm start channel shape does not match the problem");
      }
      for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t a = 0; a < na; ++a) rows(i, a) = w(red.kept[i], a);
      }
      break;
    }
  }
  NormalizeRows(rows);
  return rows;
}

SolveReport Finish(const Generator& gen, const DiscreteProblem& full, const Reduced& red,
                   Matrix rows, double beta) {
  NormalizeRows(rows);
  const std::vector<double> m = RawMarginal(red.problem.prior, rows);
  Matrix out(full.num_stimuli(), full.num_actions());
  std::size_t i = 0;
  for (std::size_t s = 0; s < full.num_stimuli(); ++s) {
    if (i < red.kept.size() && red.kept[i] == s) {
      std::copy(rows.row(i).begin(), rows.row(i).end(), out.row(s).begin());
      ++i;
    } else {
      std::copy(m.begin(), m.end(), out.row(s).begin());
    }
  }
  NormalizeRows(out);
  SolveReport rep;
  rep.channel = Channel(full.prior, std::move(out));
  rep.free_energy = FreeEnergy(gen, full, rep.channel, beta).to_double();
  return rep;
}

struct LoopState {
  Matrix rows;
  std::vector<char> pruned;
  std::vector<int> revivals;
  std::vector<double> prev_marginal;
};

// Shared outer loop: `step` advances rows by one iteration and returns false
// when no progress is possible.
template <typename Step>
SolveReport RunLoop(const Generator& gen, const DiscreteProblem& full, const SolveConfig& cfg,
                    const std::string& method, bool polish, Step&& step) {
  cfg.Validate();
  full.Validate();
  const Reduced red = Reduce(full);
  const DiscreteProblem& p = red.problem;
  const double beta = cfg.beta;
  LoopState st;
  st.rows = InitialRows(gen, p, cfg, red, full);
  st.pruned.assign(p.num_actions(), 0);
  st.revivals.assign(p.num_actions(), 0);
  st.prev_marginal = RawMarginal(p.prior, st.rows);
  for (std::size_t a = 0; a < p.num_actions(); ++a) st.pruned[a] = st.prev_marginal[a] > 0.0 ? 0 : 1;

  std::vector<double> trace;
  std::vector<std::size_t> events;
  double f = Objective(gen, p, st.rows, beta);
  if (cfg.record_trace) trace.push_back(f);
  ResidualEval res = Evaluate(gen, p, st.rows, beta, st.pruned);
  int it = 0;
  bool converged = res.parts.total() <= cfg.tol;
  if (!converged) {
    // A point mass on the best action in expectation is optimal when every
    // other action passes the unused-action test; typical at small beta.
    std::size_t best = 0;
    double best_loss = kInf;
    for (std::size_t a = 0; a < p.num_actions(); ++a) {
      double e = 0.0;
      for (std::size_t s = 0; s < p.num_stimuli(); ++s) e += p.prior[s] * p.loss(s, a);
      if (e < best_loss) {
        best_loss = e;
        best = a;
      }
    }
    Matrix point(p.num_stimuli(), p.num_actions());
    for (std::size_t s = 0; s < p.num_stimuli(); ++s) point(s, best) = 1.0;
    std::vector<char> others(p.num_actions(), 1);
    others[best] = 0;
    const ResidualEval pe = Evaluate(gen, p, point, beta, others);
    if (pe.parts.total() <= cfg.tol) {
      st.rows = std::move(point);
      st.pruned = std::move(others);
      f = Objective(gen, p, st.rows, beta);
      if (cfg.record_trace) trace.push_back(f);
      res = pe;
      converged = true;
    }
  }
  bool stalled = false;
  int next_polish = 1;
  while (!converged && it < cfg.max_iters) {
    ++it;
    const std::vector<double> before = RawMarginal(p.prior, st.rows);
    const double f_before = f;
    if (!step(p, st.rows, f)) {
      stalled = true;
    }
    if (cfg.record_trace) trace.push_back(f);
    res = Evaluate(gen, p, st.rows, beta, st.pruned);
    const bool support_changed = UpdateSupport(gen, p, st.rows, beta, cfg.tol, st.prev_marginal,
                                               st.pruned, st.revivals, res.level);
    if (support_changed) {
      f = Objective(gen, p, st.rows, beta);
      if (cfg.record_trace) {
        events.push_back(trace.size());
        trace.push_back(f);
      }
      res = Evaluate(gen, p, st.rows, beta, st.pruned);
      stalled = false;
    }
    st.prev_marginal = before;
    if (polish && !converged && (it == next_polish || support_changed)) {
      if (it == next_polish) next_polish *= 2;
      auto cand = NewtonPolish(gen, p, st.rows, beta, cfg.tol);
      if (cand) {
        const double fc = Objective(gen, p, *cand, beta);
        std::vector<char> pr(p.num_actions(), 0);
        const ResidualEval rc = Evaluate(gen, p, *cand, beta, pr);
        if (rc.parts.total() <= cfg.tol && fc <= f + 1e-12 * std::max(1.0, std::abs(f))) {
          st.rows = *cand;
          f = fc;
          res = rc;
          if (cfg.record_trace) trace.push_back(f);
          converged = true;
          break;
        }
      }
    }
    double drift = 0.0;
    const std::vector<double> after = RawMarginal(p.prior, st.rows);
    for (std::size_t a = 0; a < after.size(); ++a) drift = std::max(drift, std::abs(after[a] - before[a]));
    const bool small_change = std::abs(f_before - f) < cfg.tol && drift < cfg.tol;
    converged = res.parts.total() <= cfg.tol && (small_change || res.parts.total() <= 0.01 * cfg.tol);
    if (stalled && !converged) break;
  }
  SolveReport rep = Finish(gen, full, red, st.rows, beta);
  rep.iters = it;
  rep.residual_parts = res.parts;
  rep.residual = res.parts.total();
  rep.converged = rep.residual <= cfg.tol && converged;
  rep.method = method;
  rep.free_energy_trace = std::move(trace);
  rep.support_events = std::move(events);
  return rep;
}

// Accepts rows + t (target - rows) for the largest t in {1, 1/2, ...} giving
// sufficient decrease.
bool LineSearch(const Generator& gen, const DiscreteProblem& p, Matrix& rows, const Matrix& target,
                double& f, double beta, StepRule rule) {
  const double slack = 1e-13 * std::max(1.0, std::abs(f));
  // Directional derivative along target - rows.
  Matrix clean = rows;
  NormalizeRows(clean);
  double slope = 0.0;
  {
    const std::vector<double> m = RawMarginal(p.prior, rows);
    Channel ch(p.prior, clean);
    const std::vector<double> g = MarginalCorrection(gen, p.prior, ch);
    for (std::size_t s = 0; s < rows.rows() && std::isfinite(slope); ++s) {
      for (std::size_t a = 0; a < rows.cols(); ++a) {
        const double d = target(s, a) - rows(s, a);
        if (d == 0.0 || m[a] == 0.0) continue;
        const double fp = gen.Prime(rows(s, a) / m[a]).to_double();
        const double grad = p.loss(s, a) + (fp + g[a]) / beta;
        slope += p.prior[s] * grad * d;
      }
    }
  }
  Matrix trial(rows.rows(), rows.cols());
  for (double t = 1.0; t >= kMinStep; t *= 0.5) {
    for (std::size_t k = 0; k < trial.data().size(); ++k) {
      trial.data()[k] = rows.data()[k] + t * (target.data()[k] - rows.data()[k]);
    }
    NormalizeRows(trial);
    const double ft = Objective(gen, p, trial, beta);
    const double bound = std::isfinite(slope) ? f + kArmijo * t * std::min(slope, 0.0) : f;
    if (rule == StepRule::kFixed || ft <= bound + slack) {
      rows = trial;
      f = ft;
      return true;
    }
  }
  return false;
}

// Euclidean projection onto the probability simplex.
void ProjectSimplex(std::span<double> v) {
  std::vector<double> u(v.begin(), v.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(x - theta, 0.0);
}

}  // namespace

void SolveConfig::Validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be a finite value > 0");
  if (!(tol > 0.0)) throw ConfigError("tol must be > 0");
  if (max_iters < 0) throw ConfigError("max_iters must be >= 0");
}

double SolveResidual::total() const {
  return std::max({on_support, off_support, std::max(zero_column, 0.0)});
}

SolveResidual ChannelResidual(const Generator& gen, const DiscreteProblem& problem,
                              const Channel& channel, double beta) {
  const Reduced red = Reduce(problem);
  Matrix rows(red.kept.size(), problem.num_actions());
  for (std::size_t i = 0; i < red.kept.size(); ++i) {
    for (std::size_t a = 0; a < problem.num_actions(); ++a) rows(i, a) = channel(red.kept[i], a);
  }
  std::vector<char> none(problem.num_actions(), 0);
  return Evaluate(gen, red.problem, rows, beta, none).parts;
}

std::vector<double> PerStimulusResponse(const Generator& gen, std::span<const double> marginal,
                                        std::span<const double> loss_row, double beta) {
  RequireSmooth(gen, "per_stimulus_response");
  if (!(beta > 0.0)) throw DomainError("per_stimulus_response: beta must be > 0");
  const std::size_t na = marginal.size();
  if (loss_row.size() != na) throw DomainError("per_stimulus_response: length mismatch");
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t a = 0; a < na; ++a) {
    if (marginal[a] <= 0.0) continue;
    lo = std::min(lo, loss_row[a]);
    hi = std::max(hi, loss_row[a]);
  }
  if (!std::isfinite(lo)) throw DomainError("per_stimulus_response: marginal has no mass");
  const double sat = gen.fprime_range().hi;
  if (std::isfinite(sat)) hi = std::min(hi, lo + sat / beta);
  auto excess = [&](double lambda) {
    double acc = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      if (marginal[a] <= 0.0) continue;
      const double z = beta * (lambda - loss_row[a]);
      if (z >= sat) return kInf;
      acc += marginal[a] * gen.PrimeInverse(z);
    }
    return acc - 1.0;
  };
  double lambda = lo;
  if (hi > lo) {
    lambda = BisectIncreasing(excess, lo, hi);
  }
  std::vector<double> q(na, 0.0);
  double total = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    if (marginal[a] <= 0.0) continue;
    const double z = beta * (lambda - loss_row[a]);
    q[a] = z >= sat ? 0.0 : marginal[a] * gen.PrimeInverse(z);
    total += q[a];
  }
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw NumericFailure("per_stimulus_response: normalization failed");
  }
  for (double& v : q) v /= total;
  return q;
}

SolveReport SolveKl(const DiscreteProblem& problem, const SolveConfig& config) {
  const Generator kl = Generator::Kl();
  const double beta = config.beta;
  auto step = [&](const DiscreteProblem& p, Matrix& rows, double& f) {
    const std::vector<double> m = RawMarginal(p.prior, rows);
    std::vector<double> logits(p.num_actions());
    for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
      for (std::size_t a = 0; a < p.num_actions(); ++a) {
        logits[a] = m[a] > 0.0 ? std::log(m[a]) - beta * p.loss(s, a) : -kInf;
      }
      const double z = LogSumExp(logits);
      for (std::size_t a = 0; a < p.num_actions(); ++a) {
        rows(s, a) = m[a] > 0.0 ? std::exp(logits[a] - z) : 0.0;
      }
    }
    NormalizeRows(rows);
    f = Objective(kl, p, rows, beta);
    return true;
  };
  return RunLoop(kl, problem, config, "blahut_arimoto", false, step);
}

SolveReport SolveF(const Generator& gen, const DiscreteProblem& problem, const SolveConfig& config) {
  RequireSmooth(gen, "solve_f");
  const double beta = config.beta;
  if (config.method == SolveMethod::kResponse) {
    auto step = [&](const DiscreteProblem& p, Matrix& rows, double& f) {
      Matrix clean = rows;
      NormalizeRows(clean);
      const Channel ch(p.prior, clean);
      const std::vector<double> g = MarginalCorrection(gen, p.prior, ch);
      const std::vector<double>& m = ch.marginal();
      Matrix target(p.num_stimuli(), p.num_actions());
      std::vector<double> eff(p.num_actions());
      for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
        for (std::size_t a = 0; a < p.num_actions(); ++a) {
          eff[a] = m[a] > 0.0 ? p.loss(s, a) + g[a] / beta : kInf;
        }
        const auto q = PerStimulusResponse(gen, m, eff, beta);
        std::copy(q.begin(), q.end(), target.row(s).begin());
      }
      return LineSearch(gen, p, rows, target, f, beta, config.step_rule);
    };
    return RunLoop(gen, problem, config, "response_descent", true, step);
  }
  // Projected gradient on rows, preconditioned by 1/P(s).
  const double clip = gen.Prime(kSupportEps).to_double();
  double eta = 1.0;
  auto step = [&](const DiscreteProblem& p, Matrix& rows, double& f) {
    const std::vector<double> m = RawMarginal(p.prior, rows);
    Matrix clean = rows;
    NormalizeRows(clean);
    const Channel ch(p.prior, clean);
    const std::vector<double> g = MarginalCorrection(gen, p.prior, ch);
    Matrix grad(p.num_stimuli(), p.num_actions());
    for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
      for (std::size_t a = 0; a < p.num_actions(); ++a) {
        double kernel;
        if (m[a] > 0.0) {
          kernel = std::max(gen.Prime(rows(s, a) / m[a]).to_double(), clip) + g[a];
        } else {
          // One-sided derivative of opening an unused action in row s only.
          const double ps = p.prior[s];
          kernel = (ps * gen.Value(1.0 / ps) + (1.0 - ps) * gen.Value(0.0)).to_double();
        }
        grad(s, a) = p.loss(s, a) + kernel / beta;
      }
    }
    for (double t = std::min(1.0, 4.0 * eta); t >= kMinStep; t *= 0.5) {
      Matrix trial = rows;
      double decrease = 0.0;
      for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
        auto r = trial.row(s);
        for (std::size_t a = 0; a < r.size(); ++a) r[a] -= t * grad(s, a);
        ProjectSimplex(r);
        for (std::size_t a = 0; a < r.size(); ++a) {
          decrease += p.prior[s] * grad(s, a) * (r[a] - rows(s, a));
        }
      }
      const double ft = Objective(gen, p, trial, beta);
      if (config.step_rule == StepRule::kFixed ||
          ft <= f + kArmijo * std::min(decrease, 0.0) + 1e-13 * std::max(1.0, std::abs(f))) {
        rows = trial;
        f = ft;
        eta = t;
        return true;
      }
    }
    return false;
  };
  return RunLoop(gen, problem, config, "projected_gradient", false, step);
}

SolveReport Solve(const Generator& gen, const DiscreteProblem& problem, const SolveConfig& config) {
  return SolveF(gen, problem, config);
}

}  // namespace brh
