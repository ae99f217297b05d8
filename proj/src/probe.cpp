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

#include "brh/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <random>

#include "brh/errors.hpp"
#include "brh/hedge.hpp"
#include "brh/numeric.hpp"

namespace brh {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string Num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

double Uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Inverse CDF draw; falls back to the last index with positive weight.
std::size_t Draw(std::span<const double> weights, double u) {
  double cum = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    cum += weights[i];
    last = i;
    if (u < cum) return i;
  }
  return last;
}

Matrix Scale(const Matrix& loss, double t) {
  Matrix out = loss;
  for (double& v : out.data()) v *= t;
  return out;
}

Matrix Normalized(Matrix rows) {
  for (std::size_t s = 0; s < rows.rows(); ++s) {
    double total = 0.0;
    for (double v : rows.row(s)) total += v;
    if (!(total > 0.0)) throw DomainError("box returned a row without mass");
    for (double& v : rows.row(s)) v /= total;
  }
  return rows;
}

double RowTv(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return 0.5 * acc;
}

// Runs body(i) for i < n, in parallel when allowed, rethrowing the first error.
template <typename Body>
void ForEach(std::size_t n, bool parallel, Body&& body) {
  std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(brh_probe_error)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

}  // namespace

SolverBox::SolverBox(Generator gen, std::vector<double> prior, std::size_t num_actions,
                     SolveConfig config)
    : gen_(std::move(gen)), prior_(std::move(prior)), num_actions_(num_actions),
      config_(std::move(config)) {}

SolveConfig SolverBox::DefaultConfig() {
  SolveConfig c;
  c.tol = 1e-11;
  return c;
}

BoxResponse SolverBox::Respond(const Matrix& loss, double control, std::uint64_t) const {
  DiscreteProblem p;
  p.prior = prior_;
  p.loss = loss;
  SolveConfig cfg = config_;
  cfg.beta = control;
  const SolveReport rep = Solve(gen_, p, cfg);
  if (!rep.converged && rep.residual > 1e-6) {
    throw NumericFailure("solver box: no convergence at control " + Num(control));
  }
  BoxResponse r;
  r.rows = rep.channel.rows();
  return r;
}

SampledBox::SampledBox(std::shared_ptr<const BlackBox> inner, std::size_t n_samples)
    : inner_(std::move(inner)), n_samples_(n_samples) {
  if (n_samples_ == 0) throw ConfigError("sampled box: n_samples must be >= 1");
}

std::shared_ptr<const SampledBox::Draws> SampledBox::DrawsFor(std::uint64_t seed) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& d : cache_) {
      if (d->seed == seed) return d;
    }
  }
  const std::vector<double>& prior = inner_->prior();
  auto d = std::make_shared<Draws>();
  d->seed = seed;
  d->uniforms.resize(prior.size());
  std::mt19937_64 rng(seed);
  // Stimulus of each draw, then its action uniform; sorted per stimulus.
  for (std::size_t i = 0; i < n_samples_; ++i) {
    const double u1 = Uniform01(rng);
    const double u2 = Uniform01(rng);
    d->uniforms[Draw(prior, u1)].push_back(u2);
  }
  for (auto& u : d->uniforms) std::sort(u.begin(), u.end());
  std::lock_guard<std::mutex> lock(mutex_);
  constexpr std::size_t kCacheSeeds = 16;
  if (cache_.size() >= kCacheSeeds) cache_.pop_front();
  cache_.push_back(d);
  return d;
}

BoxResponse SampledBox::Respond(const Matrix& loss, double control, std::uint64_t seed) const {
  const BoxResponse exact = inner_->Respond(loss, control, seed);
  if (!exact.rows) throw DomainError("sampled box: inner box must report rows");
  const std::shared_ptr<const Draws> draws = DrawsFor(seed);
  Matrix counts(exact.rows->rows(), exact.rows->cols());
  for (std::size_t s = 0; s < counts.rows(); ++s) {
    const std::vector<double>& u = draws->uniforms[s];
    // Action a takes the uniforms in [cum_{a-1}, cum_a); the last action with
    // positive mass also takes any rounding remainder.
    std::size_t last = 0;
    for (std::size_t a = 0; a < counts.cols(); ++a) {
      if ((*exact.rows)(s, a) > 0.0) last = a;
    }
    double cum = 0.0;
    std::size_t below = 0;
    for (std::size_t a = 0; a < counts.cols(); ++a) {
      const double q = (*exact.rows)(s, a);
      if (q <= 0.0) continue;
      cum += q;
      const std::size_t upto =
          a == last ? u.size()
                    : static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), cum) - u.begin());
      counts(s, a) = static_cast<double>(upto - below);
      below = upto;
    }
  }
  BoxResponse r;
  r.counts = std::move(counts);
  return r;
}

Observation Observe(const BlackBox& box, const Matrix& loss, double control, std::uint64_t seed) {
  const std::vector<double>& prior = box.prior();
  if (loss.rows() != prior.size() || loss.cols() != box.num_actions()) {
    throw DomainError("observe: loss shape does not match the box");
  }
  BoxResponse resp = box.Respond(loss, control, seed);
  Observation obs;
  if (resp.rows) {
    if (resp.rows->rows() != loss.rows() || resp.rows->cols() != loss.cols()) {
      throw DomainError("observe: box rows have the wrong shape");
    }
    obs.channel = Channel(prior, Normalized(std::move(*resp.rows)));
    return obs;
  }
  Matrix counts(loss.rows(), loss.cols());
  if (resp.counts) {
    if (resp.counts->rows() != loss.rows() || resp.counts->cols() != loss.cols()) {
      throw DomainError("observe: box counts have the wrong shape");
    }
    counts = std::move(*resp.counts);
  } else {
    for (const auto& [s, a] : resp.samples) {
      if (s >= loss.rows() || a >= loss.cols()) throw DomainError("observe: sample out of range");
      counts(s, a) += 1.0;
    }
  }
  double total = 0.0;
  for (double c : counts.data()) {
    if (c < 0.0) throw DomainError("observe: negative count");
    total += c;
  }
  if (total == 0.0) throw DomainError("observe: empty sample");
  Matrix rows(loss.rows(), loss.cols());
  for (std::size_t s = 0; s < loss.rows(); ++s) {
    double n = 0.0;
    for (double c : counts.row(s)) n += c;
    if (n == 0.0) {
      if (prior[s] > 0.0) throw DomainError("observe: stimulus " + std::to_string(s) + " never sampled");
      rows(s, 0) = 1.0;
      continue;
    }
    for (std::size_t a = 0; a < loss.cols(); ++a) rows(s, a) = counts(s, a) / n;
  }
  obs.channel = Channel(prior, Normalized(std::move(rows)));
  obs.n_samples = static_cast<std::size_t>(total);
  return obs;
}

LossEstimate EstimateLoss(const BlackBox& box, const Matrix& loss, double control,
                          std::uint64_t seed) {
  LossEstimate out;
  out.observation = Observe(box, loss, control, seed);
  DiscreteProblem p;
  p.prior = box.prior();
  p.loss = loss;
  out.value = ExpectedLoss(p, out.observation.channel);
  return out;
}

std::vector<double> UniformNodes(int count) {
  if (count < 1) throw ConfigError("node count must be >= 1");
  std::vector<double> t(count + 1);
  for (int i = 0; i <= count; ++i) t[i] = static_cast<double>(i) / count;
  return t;
}

CertificateEstimate EstimateCertificate(const BlackBox& box, const Matrix& loss, double control,
                                        std::span<const double> t_nodes, std::uint64_t seed,
                                        double zero_node_scale) {
  if (t_nodes.size() < 2 || t_nodes.front() != 0.0 || t_nodes.back() != 1.0) {
    throw ConfigError("t_nodes must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < t_nodes.size(); ++i) {
    if (!(t_nodes[i] > t_nodes[i - 1])) throw ConfigError("t_nodes must be strictly ascending");
  }
  DiscreteProblem p;
  p.prior = box.prior();
  p.loss = loss;
  CertificateEstimate out;
  out.nodes.resize(t_nodes.size());
  ForEach(t_nodes.size(), box.concurrent(), [&](std::size_t i) {
    const double t = t_nodes[i] == 0.0 && zero_node_scale > 0.0 ? zero_node_scale : t_nodes[i];
    try {
      const Observation obs = Observe(box, Scale(loss, t), control, seed);
      out.nodes[i] = {t_nodes[i], ExpectedLoss(p, obs.channel)};
    } catch (const std::exception& e) {
      throw NumericFailure("estimate_certificate: node t=" + Num(t_nodes[i]) + ": " + e.what());
    }
  });
  for (std::size_t i = 1; i < out.nodes.size(); ++i) {
    const auto& [t0, l0] = out.nodes[i - 1];
    const auto& [t1, l1] = out.nodes[i];
    out.value += 0.5 * (t1 - t0) * (l0 + l1);
  }
  return out;
}

std::vector<ProbeRecord> RunProbe(const BlackBox& box, const Matrix& loss, const ProbeConfig& config) {
  if (config.controls.empty()) throw ConfigError("probe: no controls");
  std::vector<double> controls = config.controls;
  std::sort(controls.begin(), controls.end());
  std::vector<ProbeRecord> records(controls.size());
  for (std::size_t k = 0; k < controls.size(); ++k) {
    ProbeRecord& r = records[k];
    r.control = controls[k];
    r.seed = DeriveSeed(config.seed, 1, k);
    const LossEstimate le = EstimateLoss(box, loss, r.control, r.seed);
    r.loss_hat = le.value;
    r.channel = le.observation.channel;
    r.n_samples = le.observation.n_samples;
    const CertificateEstimate ce =
        EstimateCertificate(box, loss, r.control, config.t_nodes, r.seed, config.zero_node_scale);
    r.certificate_hat = ce.value;
    r.quadrature_nodes = ce.nodes;
  }
  if (records.size() >= 2) RecoverPath(records, config.anchor, config.path_rule);
  return records;
}

void RecoverPath(std::vector<ProbeRecord>& records, double anchor, PathRule rule) {
  if (records.size() < 2) throw DomainError("recover_path: need at least 2 records");
  if (!(anchor > 0.0) || !std::isfinite(anchor)) throw ConfigError("recover_path: anchor must be > 0");
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (!(records[k].control > records[k - 1].control)) {
      throw DomainError("recover_path: records must be sorted by increasing control");
    }
  }
  const std::size_t n = records.size();
  std::vector<double> gap(n);
  for (std::size_t k = 0; k < n; ++k) gap[k] = records[k].certificate_hat - records[k].loss_hat;
  // A leading run of nonpositive gaps is the information-free end of the path.
  std::size_t first = 0;
  while (first < n && !(gap[first] > 0.0)) ++first;
  if (first == n) throw DomainError("recover_path: no positive certificate gap");
  for (std::size_t k = first; k < n; ++k) {
    if (!(gap[k] > 0.0)) {
      throw DomainError("recover_path: nonpositive certificate gap at control " +
                        Num(records[k].control) + "; path not bounded-rational admissible");
    }
  }
  std::vector<double> log_beta(n, 0.0);
  for (std::size_t k = first + 1; k < n; ++k) {
    const double d_adv = records[k].certificate_hat - records[k - 1].certificate_hat;
    double inv;
    if (rule == PathRule::kTrapezoid) {
      inv = 0.5 * (1.0 / gap[k] + 1.0 / gap[k - 1]);
    } else {
      const double ratio = gap[k] / gap[k - 1];
      inv = std::abs(ratio - 1.0) < 1e-8 ? 2.0 / (gap[k] + gap[k - 1])
                                         : std::log(ratio) / (gap[k] - gap[k - 1]);
    }
    log_beta[k] = log_beta[k - 1] - d_adv * inv;
  }
  const double shift = std::log(anchor) - log_beta[n - 1];
  for (std::size_t k = 0; k < n; ++k) {
    if (k < first) {
      records[k].beta_hat = 0.0;
      records[k].info_hat = 0.0;
    } else {
      records[k].beta_hat = std::exp(log_beta[k] + shift);
      records[k].info_hat = records[k].beta_hat * gap[k];
    }
  }
}

LocalHedge RecoverLocalHedge(const BlackBox& box, const Matrix& loss, const ProbeRecord& record,
                             const LocalHedgeConfig& config) {
  if (!(config.epsilon > 0.0)) throw ConfigError("local hedge: epsilon must be > 0");
  const std::vector<double>& prior = box.prior();
  const std::size_t ns = loss.rows();
  const std::size_t na = loss.cols();
  if (record.channel.num_stimuli() != ns || record.channel.num_actions() != na) {
    throw DomainError("local hedge: record channel shape does not match the loss");
  }
  LocalHedge h;
  h.control = record.control;
  h.beta_hat = record.beta_hat;
  h.channel = record.channel;
  h.gap = record.certificate_hat - record.loss_hat;
  const double threshold =
      record.n_samples > 0
          ? std::max(config.support_floor, 5.0 / static_cast<double>(record.n_samples))
          : config.support_floor;
  h.support.assign(ns, std::vector<char>(na, 0));
  h.hedge = Matrix(ns, na, std::numeric_limits<double>::quiet_NaN());
  double mass = 0.0;
  double weighted_loss = 0.0;
  bool any_difference = false;
  for (std::size_t s = 0; s < ns; ++s) {
    if (prior[s] <= 0.0) continue;
    std::size_t size = 0;
    for (std::size_t a = 0; a < na; ++a) {
      const double q = record.channel(s, a);
      if (q <= threshold) continue;
      h.support[s][a] = 1;
      ++size;
      mass += prior[s] * q;
      weighted_loss += prior[s] * q * loss(s, a);
    }
    any_difference = any_difference || size > 1;
  }
  if (!any_difference) h.warnings.push_back("support has size 1 for every stimulus");
  if (mass > 0.0) h.level = (h.gap + weighted_loss) / mass;
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t a = 0; a < na; ++a) {
      if (h.support[s][a]) h.hedge(s, a) = h.level - loss(s, a);
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> dirs = config.directions;
  if (dirs.empty()) {
    for (std::size_t s = 0; s < ns; ++s) {
      for (std::size_t a = 0; a < na; ++a) dirs.emplace_back(s, a);
    }
  }
  h.directions.resize(dirs.size());
  ForEach(dirs.size(), box.concurrent(), [&](std::size_t i) {
    const auto [s, a] = dirs[i];
    if (s >= ns || a >= na) throw ConfigError("local hedge: direction out of range");
    DirectionResponse& d = h.directions[i];
    d.stimulus = s;
    d.action = a;
    d.epsilon = config.epsilon;
    Matrix full = loss;
    full(s, a) += config.epsilon;
    Matrix half = loss;
    half(s, a) += 0.5 * config.epsilon;
    d.full = Observe(box, full, record.control, record.seed).channel;
    d.half = Observe(box, half, record.control, record.seed).channel;
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < ns * na; ++k) {
      const double base = record.channel.rows().data()[k];
      const double r_full = d.full.rows().data()[k] - base;
      const double r_half = d.half.rows().data()[k] - base;
      diff += std::abs(r_full - 2.0 * r_half);
      norm += std::abs(r_full);
    }
    d.linear = diff <= 0.1 * norm + 1e-12;
  });
  std::size_t nonlinear = 0;
  for (const DirectionResponse& d : h.directions) nonlinear += d.linear ? 0 : 1;
  if (nonlinear > 0) {
    h.warnings.push_back(std::to_string(nonlinear) +
                         " direction(s) fail the two-scale linearity check; epsilon may be too large");
  }
  return h;
}

Matrix ImpliedChannel(const Generator& gen, std::span<const double> prior, const Channel& observed,
                      const Matrix& loss, double beta) {
  const std::vector<double>& m = observed.marginal();
  const std::size_t ns = loss.rows();
  const std::size_t na = loss.cols();
  Matrix out(ns, na);
  if (!(beta > 0.0)) {
    for (std::size_t s = 0; s < ns; ++s) std::copy(m.begin(), m.end(), out.row(s).begin());
    return out;
  }
  const std::vector<double> g = MarginalCorrection(gen, prior, observed);
  std::vector<double> eff(na);
  for (std::size_t s = 0; s < ns; ++s) {
    if (prior[s] <= 0.0) {
      std::copy(m.begin(), m.end(), out.row(s).begin());
      continue;
    }
    for (std::size_t a = 0; a < na; ++a) eff[a] = m[a] > 0.0 ? loss(s, a) + g[a] / beta : kInf;
    const auto q = PerStimulusResponse(gen, m, eff, beta);
    std::copy(q.begin(), q.end(), out.row(s).begin());
  }
  return out;
}

namespace {

struct ScoreParts {
  double channel = 0.0;
  double response = 0.0;
  double total() const { return channel + response; }
};

double WeightedTv(std::span<const double> prior, const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (std::size_t s = 0; s < a.rows(); ++s) acc += prior[s] * RowTv(a.row(s), b.row(s));
  return acc;
}

// Misfit of one record, and of its hedge's directional responses when
// present, at beta = scale * beta_hat.
ScoreParts RecordScore(const Generator& gen, const ProbeRecord& record, const LocalHedge* hedge,
                       const Matrix& loss, std::span<const double> prior, double scale) {
  ScoreParts out;
  const double beta = scale * record.beta_hat;
  const Matrix base = ImpliedChannel(gen, prior, record.channel, loss, beta);
  out.channel = WeightedTv(prior, base, record.channel.rows());
  if (hedge == nullptr || hedge->directions.empty()) return out;
  const Matrix zero(loss.rows(), loss.cols());
  Matrix resid(loss.rows(), loss.cols());
  for (const DirectionResponse& d : hedge->directions) {
    Matrix moved = loss;
    moved(d.stimulus, d.action) += d.epsilon;
    const Matrix implied = ImpliedChannel(gen, prior, d.full, moved, beta);
    // Predicted minus observed response, both as finite differences.
    for (std::size_t k = 0; k < resid.data().size(); ++k) {
      resid.data()[k] = (implied.data()[k] - base.data()[k]) -
                        (d.full.rows().data()[k] - record.channel.rows().data()[k]);
    }
    out.response += WeightedTv(prior, resid, zero);
  }
  out.response /= static_cast<double>(hedge->directions.size());
  return out;
}

// Minimizes f over [lo, hi]: uniform grid, then golden section around the
// best node.
template <typename F>
double MinimizeOnInterval(F&& f, double lo, double hi, int grid) {
  const double step = (hi - lo) / (grid - 1);
  int best = 0;
  double best_val = kInf;
  for (int i = 0; i < grid; ++i) {
    const double v = f(lo + step * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, grid - 1);
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 50; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  if (best_val <= std::min(f1, f2)) return lo + step * best;
  return f1 <= f2 ? x1 : x2;
}

}  // namespace

FitResult FitGenerator(std::span<const ProbeRecord> records, std::span<const LocalHedge> hedges,
                       const Matrix& loss, std::span<const double> prior,
                       std::span<const Generator> candidates, const FitConfig& config) {
  if (candidates.empty()) throw ConfigError("fit_generator: empty candidate list");
  if (records.empty()) throw DomainError("fit_generator: no records");
  if (!(config.scale_min > 0.0) || !(config.scale_max > config.scale_min)) {
    throw ConfigError("fit_generator: invalid scale range");
  }
  if (!(config.record_scale_range >= 1.0)) throw ConfigError("fit_generator: record_scale_range must be >= 1");
  std::vector<const LocalHedge*> matched(records.size(), nullptr);
  for (std::size_t k = 0; k < records.size(); ++k) {
    for (const LocalHedge& h : hedges) {
      if (h.control == records[k].control) matched[k] = &h;
    }
  }
  FitResult out;
  out.ranking.resize(candidates.size());
  ForEach(candidates.size(), true, [&](std::size_t c) {
    const Generator& gen = candidates[c];
    CandidateScore& cs = out.ranking[c];
    cs.generator = gen.name();
    if (!gen.smooth()) {
      cs.score = cs.channel_score = cs.response_score = kInf;
      return;
    }
    auto total = [&](double log_scale) {
      double acc = 0.0;
      for (std::size_t k = 0; k < records.size(); ++k) {
        acc += RecordScore(gen, records[k], matched[k], loss, prior, std::exp(log_scale)).total();
      }
      return acc;
    };
    const double global = MinimizeOnInterval(total, std::log(config.scale_min),
                                             std::log(config.scale_max), 49);
    cs.scale = std::exp(global);
    std::size_t with_hedge = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
      double x = global;
      if (config.record_scale_range > 1.0) {
        const double w = std::log(config.record_scale_range);
        x = MinimizeOnInterval(
            [&](double ls) {
              return RecordScore(gen, records[k], matched[k], loss, prior, std::exp(ls)).total();
            },
            global - w, global + w, 17);
      }
      const ScoreParts parts = RecordScore(gen, records[k], matched[k], loss, prior, std::exp(x));
      cs.channel_score += parts.channel;
      cs.response_score += parts.response;
      with_hedge += matched[k] != nullptr && !matched[k]->directions.empty() ? 1 : 0;
    }
    cs.channel_score /= static_cast<double>(records.size());
    if (with_hedge > 0) cs.response_score /= static_cast<double>(with_hedge);
    cs.score = cs.channel_score + cs.response_score;
  });
  std::stable_sort(out.ranking.begin(), out.ranking.end(),
                   [](const CandidateScore& a, const CandidateScore& b) { return a.score < b.score; });
  out.degenerate =
      out.ranking.size() >= 2 && std::abs(out.ranking[1].score - out.ranking[0].score) <= config.tie_tol;
  return out;
}

}  // namespace brh
