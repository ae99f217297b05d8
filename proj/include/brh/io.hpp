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

#ifndef BRH_IO_HPP_
#define BRH_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "brh/problem.hpp"

#include <json.hpp>

namespace brh {

// Shortest-roundtrip is not guaranteed by printf, so every double is written
// with 17 significant digits; nan and inf as "nan", "inf", "-inf".
std::string FormatNumber(double x);

std::string CsvLine(const std::vector<std::string>& fields);

std::string ReadTextFile(const std::string& path);
// Creates parent directories as needed.
void WriteTextFile(const std::string& path, const std::string& text);

// Parse errors become ConfigError with the line and column of the offending
// byte; `what` names the source in the message.
nlohmann::json ParseJson(const std::string& text, const std::string& what);

// {"prior": [...], "loss": [[...], ...],
//  "labels": {"stimuli": [...], "actions": [...]}}; labels are optional.
DiscreteProblem ProblemFromJson(const nlohmann::json& j);
nlohmann::json ProblemToJson(const DiscreteProblem& problem);
DiscreteProblem LoadProblem(const std::string& path);

// One line per stimulus, one column per action; the header carries the
// action labels (indices when unlabeled).
std::string ChannelCsv(const DiscreteProblem& problem, const Channel& channel);

// FNV-1a 64 of the text, 16 hex digits.
std::string HashText(const std::string& text);

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
  std::string timestamp;
};

std::string ToolVersion();
// UTC, ISO 8601.
std::string UtcTimestamp();
void WriteManifest(const std::string& dir, const RunManifest& manifest);

}  // namespace brh

#endif  // BRH_IO_HPP_
