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

// brh: command-line front end. Every subcommand writes CSV/JSON outputs and a
// manifest.json into --out (default $BRH_OUT_DIR, else ./out).

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "brh/errors.hpp"
#include "brh/experiment.hpp"
#include "brh/frontier.hpp"
#include "brh/hedge.hpp"
#include "brh/io.hpp"
#include "brh/numeric.hpp"
#include "brh/probe.hpp"
#include "brh/selftest.hpp"
#include "brh/solver.hpp"
#include "brh/tails.hpp"

namespace {

using brh::FormatNumber;
using nlohmann::json;

std::string Path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

std::vector<double> ParseList(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw brh::ConfigError(flag + ": cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw brh::ConfigError(flag + ": empty list");
  return out;
}

std::vector<std::string> SplitNames(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void Finish(const std::string& out, const std::string& command, const json& effective,
            std::uint64_t seed) {
  brh::RunManifest m;
  m.command = command;
  m.config_hash = brh::HashText(effective.dump());
  m.seed = seed;
  m.tool_version = brh::ToolVersion();
  m.timestamp = brh::UtcTimestamp();
  brh::WriteManifest(out, m);
}

brh::SolveConfig MakeSolveConfig(double beta, double tol, int max_iters, const std::string& method) {
  brh::SolveConfig c;
  c.beta = beta;
  c.tol = tol;
  c.max_iters = max_iters;
  if (method == "response") {
    c.method = brh::SolveMethod::kResponse;
  } else if (method == "projected") {
    c.method = brh::SolveMethod::kProjectedGradient;
  } else {
    throw brh::ConfigError("--method must be response or projected");
  }
  c.Validate();
  return c;
}

json SolveJson(const brh::Generator& g, const brh::DiscreteProblem& p, const brh::SolveReport& r,
               double beta) {
  const brh::Extended info = brh::FMutualInformation(g, p.prior, r.channel);
  return {{"generator", g.name()},
          {"beta", beta},
          {"loss", brh::ExpectedLoss(p, r.channel)},
          {"info_native", info.to_double()},
          {"free_energy", r.free_energy},
          {"certificate", brh::Certificate(g, p, r.channel, beta)},
          {"iterations", r.iters},
          {"residual", r.residual},
          {"converged", r.converged},
          {"method", r.method}};
}

struct Common {
  std::string out;
  std::string command;
};

int RunSolve(const Common& c, const std::string& problem_path, const std::string& gen_name,
             double beta, double tol, int max_iters, const std::string& method) {
  const auto p = brh::LoadProblem(problem_path);
  const auto g = brh::Generator::Parse(gen_name);
  const auto cfg = MakeSolveConfig(beta, tol, max_iters, method);
  const auto r = brh::Solve(g, p, cfg);
  brh::WriteTextFile(Path(c.out, "channel.csv"), brh::ChannelCsv(p, r.channel));
  const json rep = SolveJson(g, p, r, beta);
  brh::WriteTextFile(Path(c.out, "report.json"), rep.dump(2) + "\n");
  Finish(c.out, c.command,
         {{"problem", brh::ProblemToJson(p)}, {"generator", gen_name}, {"beta", beta}, {"tol", tol},
          {"max_iters", max_iters}, {"method", method}},
         0);
  std::cout << rep.dump(2) << "\n";
  return r.converged ? 0 : 1;
}

int RunHedge(const Common& c, const std::string& problem_path, const std::string& gen_name,
             double beta, double tol) {
  const auto p = brh::LoadProblem(problem_path);
  const auto g = brh::Generator::Parse(gen_name);
  const auto r = brh::Solve(g, p, MakeSolveConfig(beta, tol, 200000, "response"));
  const auto table = brh::OptimalPerturbation(g, p, r.channel, beta);
  const auto ind = brh::IndifferenceResidual(p, r.channel, table.values);
  std::string csv = brh::CsvLine({"stimulus", "action", "probability", "hedge", "effective_loss"});
  for (std::size_t s = 0; s < p.num_stimuli(); ++s) {
    for (std::size_t a = 0; a < p.num_actions(); ++a) {
      const double h = table.values(s, a);
      csv += brh::CsvLine({std::to_string(s), std::to_string(a), FormatNumber(r.channel(s, a)),
                           FormatNumber(h), FormatNumber(p.loss(s, a) + h)});
    }
  }
  brh::WriteTextFile(Path(c.out, "hedge.csv"), csv);
  json rep = SolveJson(g, p, r, beta);
  rep["penalty"] = table.penalty.to_double();
  rep["indifference_on_support"] = ind.max_on_support;
  rep["indifference_off_support"] = ind.max_off_support;
  rep["warnings"] = table.warnings;
  brh::WriteTextFile(Path(c.out, "report.json"), rep.dump(2) + "\n");
  Finish(c.out, c.command,
         {{"problem", brh::ProblemToJson(p)}, {"generator", gen_name}, {"beta", beta}, {"tol", tol}}, 0);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

int RunHedgeGrid(const Common& c, const std::string& problem_path, const std::string& gen_name,
                 const std::string& betas_text, const std::string& adv_text, double tol) {
  const auto p = brh::LoadProblem(problem_path);
  const auto g = brh::Generator::Parse(gen_name);
  const auto betas = ParseList(betas_text, "--betas");
  const auto adv = ParseList(adv_text, "--beta-adv");
  const auto grid = brh::EffectiveLossGrid(g, p, betas, adv, MakeSolveConfig(1.0, tol, 200000, "response"));
  std::string csv = brh::CsvLine({"beta", "beta_adv", "effective_loss"});
  for (std::size_t i = 0; i < betas.size(); ++i) {
    for (std::size_t j = 0; j < adv.size(); ++j) {
      csv += brh::CsvLine({FormatNumber(betas[i]), FormatNumber(adv[j]), FormatNumber(grid(i, j))});
    }
  }
  brh::WriteTextFile(Path(c.out, "hedge_grid.csv"), csv);
  Finish(c.out, c.command,
         {{"problem", brh::ProblemToJson(p)}, {"generator", gen_name}, {"betas", betas},
          {"beta_adv", adv}, {"tol", tol}},
         0);
  return 0;
}

int RunFrontier(const Common& c, const std::string& problem_path, const std::string& gen_name,
                double lo, double hi, int points, const std::string& project, double tol) {
  const auto p = brh::LoadProblem(problem_path);
  const auto g = brh::Generator::Parse(gen_name);
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw brh::ConfigError("frontier: need 0 < --beta-min < --beta-max and --points >= 2");
  }
  brh::TraceConfig tc;
  tc.solve = MakeSolveConfig(1.0, tol, 200000, "response");
  const auto grid = brh::GeometricGrid(lo, hi, points);
  brh::FrontierCurve curve = brh::Trace(g, p, grid, tc);
  const auto refs = SplitNames(project);
  for (const auto& name : refs) curve = brh::Project(curve, brh::Generator::Parse(name), p.prior);
  std::vector<std::string> header = {"beta", "solved", "I_native", "L", "L_adv"};
  for (const auto& name : refs) {
    header.push_back("I_projected_" + name);
    if (brh::Generator::Parse(name).id() == brh::GeneratorId::kKl) header.push_back("I_projected_kl_bits");
  }
  header.push_back("flags");
  std::string csv = brh::CsvLine(header);
  for (const auto& pt : curve.points) {
    std::vector<std::string> f = {FormatNumber(pt.beta), pt.solved ? "1" : "0",
                                  FormatNumber(pt.info_native), FormatNumber(pt.loss),
                                  FormatNumber(pt.certificate)};
    for (const auto& name : refs) {
      const auto it = pt.info_projected.find(brh::Generator::Parse(name).name());
      const double v = it == pt.info_projected.end() ? std::nan("") : it->second;
      f.push_back(FormatNumber(v));
      if (brh::Generator::Parse(name).id() == brh::GeneratorId::kKl) f.push_back(FormatNumber(v / std::log(2.0)));
    }
    std::string flags;
    for (const auto& fl : pt.flags) flags += (flags.empty() ? "" : ";") + fl;
    if (!pt.error.empty()) flags += (flags.empty() ? "" : ";") + pt.error;
    f.push_back(flags);
    csv += brh::CsvLine(f);
  }
  brh::WriteTextFile(Path(c.out, "frontier.csv"), csv);
  Finish(c.out, c.command,
         {{"problem", brh::ProblemToJson(p)}, {"generator", gen_name}, {"beta_min", lo},
          {"beta_max", hi}, {"points", points}, {"project", refs}, {"tol", tol}},
         0);
  return curve.non_monotone.empty() ? 0 : 1;
}

int RunTails(const Common& c, const std::string& gen_name, double u, double info, double phi,
             double beta, const std::optional<double>& q_bar) {
  brh::TailQuery q;
  q.gen = brh::Generator::Parse(gen_name);
  q.u = u;
  q.info = info;
  q.phi = phi;
  q.beta = beta;
  q.q_bar_override = q_bar;
  const auto r = brh::EvaluateTail(q);
  const json rep = {{"generator", q.gen.name()}, {"u", u}, {"info", info}, {"phi", phi},
                    {"beta", beta}, {"q_bar", r.q_bar}, {"delta", r.delta}, {"flags", r.flags}};
  brh::WriteTextFile(Path(c.out, "tails.json"), rep.dump(2) + "\n");
  Finish(c.out, c.command, rep, 0);
  std::cout << rep.dump(2) << "\n";
  return 0;
}

struct ProbeOptions {
  std::string box;
  std::string problem;
  std::string config;
  std::string controls;
  int t_nodes = 9;
  std::size_t samples = 0;
  double anchor = 1.0;
  std::uint64_t seed = 0;
  std::string fit;
  double epsilon = 0.05;
  std::string path_rule = "logmean";
};

// Presents a box whose control is the position along a user-ordered path.
class PathIndexBox : public brh::BlackBox {
 public:
  PathIndexBox(std::shared_ptr<const brh::BlackBox> inner, std::vector<double> controls)
      : inner_(std::move(inner)), controls_(std::move(controls)) {}
  brh::BoxResponse Respond(const brh::Matrix& loss, double index, std::uint64_t seed) const override {
    return inner_->Respond(loss, controls_.at(static_cast<std::size_t>(index)), seed);
  }
  const std::vector<double>& prior() const override { return inner_->prior(); }
  std::size_t num_actions() const override { return inner_->num_actions(); }
  bool concurrent() const override { return inner_->concurrent(); }

 private:
  std::shared_ptr<const brh::BlackBox> inner_;
  std::vector<double> controls_;
};

int RunProbeCommand(const Common& c, const ProbeOptions& o) {
  if (o.t_nodes < 2) throw brh::ConfigError("--t-nodes must be >= 2");
  brh::ProbeConfig pc;
  pc.controls = ParseList(o.controls, "--controls");
  pc.t_nodes = brh::UniformNodes(o.t_nodes - 1);
  pc.anchor = o.anchor;
  pc.seed = o.seed;
  if (o.path_rule == "logmean") {
    pc.path_rule = brh::PathRule::kLogMean;
  } else if (o.path_rule == "trapezoid") {
    pc.path_rule = brh::PathRule::kTrapezoid;
  } else {
    throw brh::ConfigError("--path-rule must be logmean or trapezoid");
  }
  // Learner controls are taken in the given (path) order.
  std::vector<double> path_controls;
  std::shared_ptr<const brh::BlackBox> box;
  brh::Matrix loss;
  json effective = {{"box", o.box}, {"controls", pc.controls}, {"t_nodes", o.t_nodes},
                    {"samples", o.samples}, {"anchor", o.anchor}, {"fit", o.fit}, {"epsilon", o.epsilon},
                    {"path_rule", o.path_rule}};
  const std::string builtin = "builtin:";
  const std::string cmd = "cmd:";
  if (o.box.rfind(builtin, 0) == 0) {
    const std::string name = o.box.substr(builtin.size());
    if (name == "kernel_ridge" || name == "mlp") {
      if (o.config.empty()) throw brh::ConfigError("probe: learner boxes need --config <experiment.json>");
      auto cfg = brh::ExperimentConfigFromJson(brh::ReadTextFile(o.config), "");
      cfg.learners = {name};
      const auto task = brh::RegressionTask::Make(cfg.n, cfg.noise_sd);
      auto lb = std::make_shared<brh::LearnerBox>(
          std::shared_ptr<const brh::Learner>(brh::MakeLearner(name, task, cfg.lengthscale, cfg.mlp)),
          brh::MonteCarloSamples(cfg), brh::PilotCodebook(cfg), cfg.seed);
      loss = lb->base_loss();
      box = lb;
      // A zero training loss is a well-defined learner input.
      pc.zero_node_scale = 0.0;
      path_controls = pc.controls;
      for (std::size_t k = 0; k < pc.controls.size(); ++k) pc.controls[k] = static_cast<double>(k);
      box = std::make_shared<PathIndexBox>(box, path_controls);
      effective["experiment"] = brh::ParseJson(brh::ReadTextFile(o.config), o.config);
    } else {
      const auto p = brh::LoadProblem(o.problem);
      box = std::make_shared<brh::SolverBox>(brh::Generator::Parse(name), p.prior, p.num_actions());
      loss = p.loss;
      effective["problem"] = brh::ProblemToJson(p);
    }
  } else if (o.box.rfind(cmd, 0) == 0) {
    const auto p = brh::LoadProblem(o.problem);
    std::vector<std::string> argv;
    std::stringstream ss(o.box.substr(cmd.size()));
    for (std::string w; ss >> w;) argv.push_back(w);
    if (argv.empty()) throw brh::ConfigError("--box cmd: needs a command");
    box = std::make_shared<brh::SubprocessBox>(argv, p.prior, p.num_actions());
    loss = p.loss;
    effective["problem"] = brh::ProblemToJson(p);
  } else {
    throw brh::ConfigError("--box must be builtin:<kl|pearson_chi2|sq_hellinger|...|kernel_ridge|mlp> or cmd:<command>");
  }
  if (o.samples > 0) box = std::make_shared<brh::SampledBox>(box, o.samples);

  const auto records = brh::RunProbe(*box, loss, pc);
  std::string csv = brh::CsvLine({"control", "loss_hat", "certificate_hat", "beta_hat", "info_hat", "n_samples"});
  std::string nodes = brh::CsvLine({"control", "t", "L_t"});
  for (const auto& r : records) {
    const double control = path_controls.empty() ? r.control : path_controls[static_cast<std::size_t>(r.control)];
    csv += brh::CsvLine({FormatNumber(control), FormatNumber(r.loss_hat), FormatNumber(r.certificate_hat),
                         FormatNumber(r.beta_hat), FormatNumber(r.info_hat), std::to_string(r.n_samples)});
    for (const auto& [t, lt] : r.quadrature_nodes) {
      nodes += brh::CsvLine({FormatNumber(control), FormatNumber(t), FormatNumber(lt)});
    }
  }
  brh::WriteTextFile(Path(c.out, "probe.csv"), csv);
  brh::WriteTextFile(Path(c.out, "probe_nodes.csv"), nodes);

  if (!o.fit.empty()) {
    std::vector<brh::Generator> cands;
    for (const auto& n : SplitNames(o.fit)) cands.push_back(brh::Generator::Parse(n));
    brh::LocalHedgeConfig hc;
    hc.epsilon = o.epsilon;
    std::vector<brh::LocalHedge> hedges;
    for (const auto& r : records) {
      if (r.beta_hat > 0.0) hedges.push_back(brh::RecoverLocalHedge(*box, loss, r, hc));
    }
    const auto fit = brh::FitGenerator(records, hedges, loss, box->prior(), cands);
    std::string fcsv = brh::CsvLine({"rank", "generator", "score", "channel_score", "response_score", "scale"});
    for (std::size_t i = 0; i < fit.ranking.size(); ++i) {
      const auto& s = fit.ranking[i];
      fcsv += brh::CsvLine({std::to_string(i + 1), s.generator, FormatNumber(s.score),
                            FormatNumber(s.channel_score), FormatNumber(s.response_score),
                            FormatNumber(s.scale)});
    }
    brh::WriteTextFile(Path(c.out, "fit.csv"), fcsv);
    std::cout << "fit: " << fit.ranking.front().generator << (fit.degenerate ? " (degenerate)" : "") << "\n";
  }
  Finish(c.out, c.command, effective, o.seed);
  return 0;
}

int RunExperimentCommand(const Common& c, const std::string& config_path, const std::string& scale,
                         std::optional<std::uint64_t> seed) {
  const std::string text = config_path.empty() ? "{}" : brh::ReadTextFile(config_path);
  auto cfg = brh::ExperimentConfigFromJson(text, scale);
  if (seed) cfg.seed = *seed;
  const auto report = brh::RunExperiment(cfg, c.out);
  std::string scaled = brh::CsvLine({"learner", "control", "t", "L_t"});
  for (const auto& curve : report.curves) {
    for (const auto& p : curve.points) {
      for (std::size_t j = 0; j < cfg.t_nodes.size(); ++j) {
        scaled += brh::CsvLine({curve.learner, FormatNumber(p.control), FormatNumber(cfg.t_nodes[j]),
                                FormatNumber(p.scaled_loss[j])});
      }
    }
  }
  brh::WriteTextFile(Path(c.out, "scaled_loss.csv"), scaled);
  const std::string rep = brh::ReportJson(report);
  brh::WriteTextFile(Path(c.out, "report.json"), rep);
  Finish(c.out, c.command, json::parse(rep)["config"], cfg.seed);
  for (const auto& [stage, secs] : report.timings) std::printf("%-24s %8.2f s\n", stage.c_str(), secs);
  return 0;
}

int RunSelftestCommand(const Common& c, std::uint64_t seed) {
  const auto checks = brh::RunSelftest(seed);
  bool ok = true;
  json rep = json::array();
  for (const auto& ch : checks) {
    std::printf("%s %s: %s\n", ch.passed ? "PASS" : "FAIL", ch.name.c_str(), ch.detail.c_str());
    ok = ok && ch.passed;
    rep.push_back({{"name", ch.name}, {"passed", ch.passed}, {"detail", ch.detail}});
  }
  brh::WriteTextFile(Path(c.out, "selftest.json"), rep.dump(2) + "\n");
  Finish(c.out, c.command, {{"seed", seed}}, seed);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bounded-rational channels: solve, hedge, frontier, tails, probe, experiment"};
  app.require_subcommand(1);
  int threads = 0;
  if (const char* env = std::getenv("BRH_THREADS")) threads = std::atoi(env);
  app.add_option("--threads", threads, "Worker threads (default: all cores; env BRH_THREADS)");
  std::string out = "out";
  if (const char* env = std::getenv("BRH_OUT_DIR")) out = env;
  app.add_option("--out", out, "Output directory (env BRH_OUT_DIR)");

  std::string problem, gen = "kl", method = "response";
  double beta = 1.0, tol = 1e-10;
  int max_iters = 200000;

  auto* solve = app.add_subcommand("solve", "Solve the bounded-rational channel at one beta");
  solve->add_option("--problem", problem, "Problem JSON")->required();
  solve->add_option("--generator", gen, "Generator id");
  solve->add_option("--beta", beta, "Operating level");
  solve->add_option("--tol", tol, "KKT tolerance");
  solve->add_option("--max-iters", max_iters, "Iteration cap");
  solve->add_option("--method", method, "response | projected");

  auto* hedge = app.add_subcommand("hedge", "Optimal perturbation and certificate at one beta");
  hedge->add_option("--problem", problem, "Problem JSON")->required();
  hedge->add_option("--generator", gen, "Generator id");
  hedge->add_option("--beta", beta, "Operating level");
  hedge->add_option("--tol", tol, "KKT tolerance");

  std::string betas = "0.5,1,2,4", beta_adv = "0.5,1,2,4";
  auto* grid = app.add_subcommand("hedge-grid", "L(beta) + I(beta)/beta_adv over two grids");
  grid->add_option("--problem", problem, "Problem JSON")->required();
  grid->add_option("--generator", gen, "Generator id");
  grid->add_option("--betas", betas, "Comma-separated operating levels");
  grid->add_option("--beta-adv", beta_adv, "Comma-separated adversary levels");
  grid->add_option("--tol", tol, "KKT tolerance");

  double beta_min = 0.1, beta_max = 100.0;
  int points = 30;
  std::string project;
  auto* frontier = app.add_subcommand("frontier", "Trace the lower and certificate frontiers");
  frontier->add_option("--problem", problem, "Problem JSON")->required();
  frontier->add_option("--generator", gen, "Generator id");
  frontier->add_option("--beta-min", beta_min, "Smallest beta");
  frontier->add_option("--beta-max", beta_max, "Largest beta");
  frontier->add_option("--points", points, "Geometric grid size");
  frontier->add_option("--project", project, "Comma-separated reference generators");
  frontier->add_option("--tol", tol, "KKT tolerance");

  double u = 0.0, info = 0.0, phi = 0.0;
  std::optional<double> q_bar;
  auto* tails = app.add_subcommand("tails", "Joint-law tail bound from a product-law bound and I_f");
  tails->add_option("--generator", gen, "kl | pearson_chi2 | sq_hellinger");
  tails->add_option("--u", u, "Threshold (loss units)")->required();
  tails->add_option("--info", info, "I_f in nats")->required();
  tails->add_option("--phi", phi, "Adversarial penalty");
  tails->add_option("--beta", beta, "Operating level");
  tails->add_option("--q-bar", q_bar, "Product-law tail bound override");

  ProbeOptions po;
  auto* probe = app.add_subcommand("probe", "Estimate loss, certificate, beta path from a black box");
  probe->add_option("--box", po.box, "builtin:<generator|kernel_ridge|mlp> or cmd:<command line>")->required();
  probe->add_option("--problem", po.problem, "Problem JSON (solver and subprocess boxes)");
  probe->add_option("--config", po.config, "Experiment JSON (learner boxes)");
  probe->add_option("--controls", po.controls, "Comma-separated controls")->required();
  probe->add_option("--t-nodes", po.t_nodes, "Loss-scaling nodes including 0 and 1");
  probe->add_option("--samples", po.samples, "Sample pairs per query (0 = exact rows)");
  probe->add_option("--anchor", po.anchor, "beta_hat at the last record of the path");
  probe->add_option("--seed", po.seed, "Master seed");
  probe->add_option("--fit", po.fit, "Comma-separated candidate generators to rank");
  probe->add_option("--epsilon", po.epsilon, "Local-hedge perturbation size");
  probe->add_option("--path-rule", po.path_rule, "Path integration rule: logmean or trapezoid");

  std::string exp_config, scale;
  std::optional<std::uint64_t> exp_seed;
  auto* experiment = app.add_subcommand("experiment", "Learning-as-hedging regression experiment");
  experiment->add_option("--config", exp_config, "Experiment JSON");
  experiment->add_option("--scale", scale, "desk | paper (overrides run-size fields of the file)");
  experiment->add_option("--seed", exp_seed, "Master seed (overrides the file)");

  std::uint64_t st_seed = 1;
  auto* selftest = app.add_subcommand("selftest", "White-box invariant suite");
  selftest->add_option("--seed", st_seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) omp_set_num_threads(threads);

  Common c;
  c.out = out;
  for (int i = 0; i < argc; ++i) c.command += (i ? " " : "") + std::string(argv[i]);
  std::string module = app.get_subcommands().front()->get_name();
  try {
    if (*solve) return RunSolve(c, problem, gen, beta, tol, max_iters, method);
    if (*hedge) return RunHedge(c, problem, gen, beta, tol);
    if (*grid) return RunHedgeGrid(c, problem, gen, betas, beta_adv, tol);
    if (*frontier) return RunFrontier(c, problem, gen, beta_min, beta_max, points, project, tol);
    if (*tails) return RunTails(c, gen, u, info, phi, beta, q_bar);
    if (*probe) return RunProbeCommand(c, po);
    if (*experiment) return RunExperimentCommand(c, exp_config, scale, exp_seed);
    if (*selftest) return RunSelftestCommand(c, st_seed);
  } catch (const brh::ConfigError& e) {
    std::fprintf(stderr, "config error [%s]: %s\n", module.c_str(), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error [%s]: %s\n", module.c_str(), e.what());
    return 1;
  }
  return 2;
}
