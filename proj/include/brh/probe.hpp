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

#ifndef BRH_PROBE_HPP_
#define BRH_PROBE_HPP_

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "brh/generators.hpp"
#include "brh/matrix.hpp"
#include "brh/problem.hpp"
#include "brh/solver.hpp"

namespace brh {

// Exact conditional rows, observed (stimulus, action) pairs, or the same
// pairs aggregated into counts.
struct BoxResponse {
  std::optional<Matrix> rows;
  std::vector<std::pair<std::size_t, std::size_t>> samples;
  std::optional<Matrix> counts;
};

class BlackBox {
 public:
  virtual ~BlackBox() = default;
  // Deterministic in (loss, control, seed).
  virtual BoxResponse Respond(const Matrix& loss, double control, std::uint64_t seed) const = 0;
  virtual const std::vector<double>& prior() const = 0;
  virtual std::size_t num_actions() const = 0;
  // False if calls must not overlap.
  virtual bool concurrent() const { return true; }
};

// Exact bounded-rational responder: control is beta.
class SolverBox : public BlackBox {
 public:
  SolverBox(Generator gen, std::vector<double> prior, std::size_t num_actions,
            SolveConfig config = DefaultConfig());
  BoxResponse Respond(const Matrix& loss, double control, std::uint64_t seed) const override;
  const std::vector<double>& prior() const override { return prior_; }
  std::size_t num_actions() const override { return num_actions_; }

  static SolveConfig DefaultConfig();

 private:
  Generator gen_;
  std::vector<double> prior_;
  std::size_t num_actions_;
  SolveConfig config_;
};

// Draws n (s, a) pairs from an exact box by inverse-CDF sampling and
// reports their counts. The uniforms depend only on the seed, so
// interventions sharing a seed use common random numbers: counts move only
// when a CDF boundary crosses a uniform.
class SampledBox : public BlackBox {
 public:
  SampledBox(std::shared_ptr<const BlackBox> inner, std::size_t n_samples);
  BoxResponse Respond(const Matrix& loss, double control, std::uint64_t seed) const override;
  const std::vector<double>& prior() const override { return inner_->prior(); }
  std::size_t num_actions() const override { return inner_->num_actions(); }
  bool concurrent() const override { return inner_->concurrent(); }

 private:
  // Sorted action uniforms per stimulus for one seed.
  struct Draws {
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> uniforms;
  };
  std::shared_ptr<const Draws> DrawsFor(std::uint64_t seed) const;

  std::shared_ptr<const BlackBox> inner_;
  std::size_t n_samples_;
  mutable std::mutex mutex_;
  mutable std::deque<std::shared_ptr<const Draws>> cache_;
};

// Channel estimate from one response: exact rows, or per-stimulus action
// frequencies weighted by the declared prior.
struct Observation {
  Channel channel;
  // 0 for exact rows.
  std::size_t n_samples = 0;
};

Observation Observe(const BlackBox& box, const Matrix& loss, double control, std::uint64_t seed);

struct LossEstimate {
  double value = 0.0;
  Observation observation;
};

LossEstimate EstimateLoss(const BlackBox& box, const Matrix& loss, double control,
                          std::uint64_t seed);

// {0, 1/k, ..., 1}.
std::vector<double> UniformNodes(int count);

struct CertificateEstimate {
  double value = 0.0;
  // (t, L(t)) with L(t) the original loss of the response to t * loss.
  std::vector<std::pair<double, double>> nodes;
};

// Trapezoidal integral of L(t) over the nodes. A node at t = 0 is queried at
// t = zero_node_scale when that is positive, approximating the t -> 0+ limit
// for boxes whose response to an all-zero loss is not unique.
CertificateEstimate EstimateCertificate(const BlackBox& box, const Matrix& loss, double control,
                                        std::span<const double> t_nodes, std::uint64_t seed,
                                        double zero_node_scale = 0.0);

struct ProbeRecord {
  double control = 0.0;
  double loss_hat = 0.0;
  double certificate_hat = 0.0;
  double beta_hat = 0.0;
  double info_hat = 0.0;
  std::vector<std::pair<double, double>> quadrature_nodes;
  // Response to the unscaled loss.
  Channel channel;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

enum class PathRule {
  // Mean of 1/gap at the two ends of each step.
  kTrapezoid,
  // 1/gap replaced by 1/logmean(gap); exact when the gap is a power of beta.
  kLogMean,
};

struct ProbeConfig {
  std::vector<double> controls;
  std::vector<double> t_nodes = UniformNodes(8);
  double zero_node_scale = 1e-9;
  std::uint64_t seed = 0;
  // beta_hat at the last record.
  double anchor = 1.0;
  PathRule path_rule = PathRule::kLogMean;
};

// Loss and certificate at every control, then RecoverPath.
std::vector<ProbeRecord> RunProbe(const BlackBox& box, const Matrix& loss, const ProbeConfig& config);

// Integrates d log beta = -d L_adv / (L_adv - L) over adjacent records and
// sets info_hat = beta_hat (L_adv - L). Records must be sorted by control.
// A leading run of nonpositive gaps gets beta_hat = info_hat = 0; any later
// nonpositive gap is an error.
void RecoverPath(std::vector<ProbeRecord>& records, double anchor = 1.0,
                 PathRule rule = PathRule::kLogMean);

struct DirectionResponse {
  std::size_t stimulus = 0;
  std::size_t action = 0;
  double epsilon = 0.0;
  // Channels observed under loss + eps e_{s,a} and loss + (eps/2) e_{s,a}.
  Channel full;
  Channel half;
  bool linear = true;
};

struct LocalHedge {
  double control = 0.0;
  double beta_hat = 0.0;
  Channel channel;
  // On-support entries of C_s(a) = level - l(s,a); NaN off the support.
  Matrix hedge;
  std::vector<std::vector<char>> support;
  // Common per-stimulus constant fixed by sum P(s,a) C = gap.
  double level = 0.0;
  double gap = 0.0;
  std::vector<DirectionResponse> directions;
  std::vector<std::string> warnings;
};

struct LocalHedgeConfig {
  double epsilon = 1e-2;
  // (s, a) pairs to perturb; empty means every pair.
  std::vector<std::pair<std::size_t, std::size_t>> directions;
  double support_floor = 1e-3;
};

LocalHedge RecoverLocalHedge(const BlackBox& box, const Matrix& loss, const ProbeRecord& record,
                             const LocalHedgeConfig& config);

// Rows the candidate's indifference condition implies for the observed
// marginal and marginal correction: PerStimulusResponse(g, m, l + G/beta, beta).
// beta = 0 gives the marginal in every row.
Matrix ImpliedChannel(const Generator& gen, std::span<const double> prior, const Channel& observed,
                      const Matrix& loss, double beta);

struct CandidateScore {
  std::string generator;
  double score = 0.0;
  double channel_score = 0.0;
  double response_score = 0.0;
  // Common fitted multiplier on beta_hat (the unit of native information).
  double scale = 1.0;
};

struct FitResult {
  std::vector<CandidateScore> ranking;
  bool degenerate = false;
};

struct FitConfig {
  // Search range for the common multiplier on beta_hat.
  double scale_min = 1e-3;
  double scale_max = 1e3;
  // Each record's multiplier is then refined within this factor of the
  // common one, absorbing path-recovery error in beta_hat; 1 disables.
  double record_scale_range = 4.0;
  // Ratio-tie threshold that raises the degenerate flag.
  double tie_tol = 1e-6;
};

FitResult FitGenerator(std::span<const ProbeRecord> records, std::span<const LocalHedge> hedges,
                       const Matrix& loss, std::span<const double> prior,
                       std::span<const Generator> candidates, const FitConfig& config = {});

// Line-delimited JSON protocol over a child process: request
// {"loss": [[...]], "control": c, "seed": n}, response {"rows": [[...]]} or
// {"samples": [[s, a], ...]}.
class SubprocessBox : public BlackBox {
 public:
  SubprocessBox(std::vector<std::string> argv, std::vector<double> prior, std::size_t num_actions);
  ~SubprocessBox() override;
  SubprocessBox(const SubprocessBox&) = delete;
  SubprocessBox& operator=(const SubprocessBox&) = delete;

  BoxResponse Respond(const Matrix& loss, double control, std::uint64_t seed) const override;
  const std::vector<double>& prior() const override { return prior_; }
  std::size_t num_actions() const override { return num_actions_; }
  bool concurrent() const override { return false; }

 private:
  std::vector<double> prior_;
  std::size_t num_actions_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  mutable std::string buffer_;
};

}  // namespace brh

#endif  // BRH_PROBE_HPP_
