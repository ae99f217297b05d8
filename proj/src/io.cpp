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

#include "brh/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "brh/errors.hpp"

namespace brh {

std::string FormatNumber(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvLine(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) line += ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\n") == std::string::npos) {
      line += f;
    } else {
      line += '"';
      for (char c : f) {
        if (c == '"') line += '"';
        line += c;
      }
      line += '"';
    }
  }
  line += '\n';
  return line;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

nlohmann::json ParseJson(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(what + ": JSON parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(col));
  }
}

namespace {

std::vector<double> NumberArray(const nlohmann::json& j, const std::string& field) {
  if (!j.is_array()) throw ConfigError("problem: field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw ConfigError("problem: field '" + field + "[" + std::to_string(i) + "]' must be a number");
    }
    out.push_back(j[i].get<double>());
  }
  return out;
}

std::vector<std::string> Labels(const nlohmann::json& j, const std::string& field, std::size_t n) {
  if (!j.contains(field)) return {};
  const auto& a = j.at(field);
  if (!a.is_array() || a.size() != n) {
    throw ConfigError("problem: field 'labels." + field + "' must be an array of " + std::to_string(n) +
                      " strings");
  }
  std::vector<std::string> out;
  for (const auto& v : a) {
    if (!v.is_string()) throw ConfigError("problem: field 'labels." + field + "' must hold strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

DiscreteProblem ProblemFromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("problem: top level must be an object");
  for (const char* f : {"prior", "loss"}) {
    if (!j.contains(f)) throw ConfigError(std::string("problem: missing field '") + f + "'");
  }
  DiscreteProblem p;
  p.prior = NumberArray(j.at("prior"), "prior");
  const auto& loss = j.at("loss");
  if (!loss.is_array()) throw ConfigError("problem: field 'loss' must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < loss.size(); ++s) {
    rows.push_back(NumberArray(loss[s], "loss[" + std::to_string(s) + "]"));
    if (rows.back().size() != rows.front().size()) {
      throw ConfigError("problem: field 'loss[" + std::to_string(s) + "]' has a different length");
    }
  }
  p.loss = Matrix::FromRows(rows);
  try {
    p.Validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("problem: ") + e.what());
  }
  if (j.contains("labels")) {
    const auto& l = j.at("labels");
    if (!l.is_object()) throw ConfigError("problem: field 'labels' must be an object");
    for (const auto& [key, _] : l.items()) {
      if (key != "stimuli" && key != "actions") {
        throw ConfigError("problem: unknown field 'labels." + key + "' (expected stimuli, actions)");
      }
    }
    p.stimulus_labels = Labels(l, "stimuli", p.num_stimuli());
    p.action_labels = Labels(l, "actions", p.num_actions());
  }
  for (const auto& [key, _] : j.items()) {
    if (key != "prior" && key != "loss" && key != "labels") {
      throw ConfigError("problem: unknown field '" + key + "'");
    }
  }
  return p;
}

nlohmann::json ProblemToJson(const DiscreteProblem& problem) {
  nlohmann::json j;
  j["prior"] = problem.prior;
  nlohmann::json loss = nlohmann::json::array();
  for (std::size_t s = 0; s < problem.loss.rows(); ++s) {
    auto r = problem.loss.row(s);
    loss.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["loss"] = loss;
  if (!problem.stimulus_labels.empty()) j["labels"]["stimuli"] = problem.stimulus_labels;
  if (!problem.action_labels.empty()) j["labels"]["actions"] = problem.action_labels;
  return j;
}

DiscreteProblem LoadProblem(const std::string& path) {
  return ProblemFromJson(ParseJson(ReadTextFile(path), path));
}

std::string ChannelCsv(const DiscreteProblem& problem, const Channel& channel) {
  std::vector<std::string> header = {"stimulus"};
  for (std::size_t a = 0; a < channel.num_actions(); ++a) {
    header.push_back(problem.action_labels.empty() ? std::to_string(a) : problem.action_labels[a]);
  }
  std::string out = CsvLine(header);
  for (std::size_t s = 0; s < channel.num_stimuli(); ++s) {
    std::vector<std::string> f = {problem.stimulus_labels.empty() ? std::to_string(s)
                                                                   : problem.stimulus_labels[s]};
    for (std::size_t a = 0; a < channel.num_actions(); ++a) f.push_back(FormatNumber(channel(s, a)));
    out += CsvLine(f);
  }
  return out;
}

std::string HashText(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ToolVersion() { return "0.1.0"; }

std::string UtcTimestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteManifest(const std::string& dir, const RunManifest& manifest) {
  nlohmann::json j;
  j["command"] = manifest.command;
  j["config_hash"] = manifest.config_hash;
  j["seed"] = manifest.seed;
  j["tool_version"] = manifest.tool_version;
  j["timestamp"] = manifest.timestamp;
  WriteTextFile((std::filesystem::path(dir) / "manifest.json").string(), j.dump(2) + "\n");
}

}  // namespace brh
