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

#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include <json.hpp>

#include "brh/errors.hpp"
#include "brh/probe.hpp"

namespace brh {
namespace {

void WriteAll(int fd, const std::string& text) {
  std::size_t done = 0;
  while (done < text.size()) {
    const ssize_t n = ::write(fd, text.data() + done, text.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NumericFailure(std::string("subprocess box: write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

SubprocessBox::SubprocessBox(std::vector<std::string> argv, std::vector<double> prior,
                             std::size_t num_actions)
    : prior_(std::move(prior)), num_actions_(num_actions) {
  if (argv.empty()) throw ConfigError("subprocess box: empty command");
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe(in_pipe) != 0) throw NumericFailure("subprocess box: pipe failed");
  if (::pipe(out_pipe) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw NumericFailure("subprocess box: pipe failed");
  }
  // Writes to a dead child must fail with EPIPE rather than kill us.
  ::signal(SIGPIPE, SIG_IGN);
  const pid_t pid = ::fork();
  if (pid < 0) throw NumericFailure("subprocess box: fork failed");
  if (pid == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    std::vector<char*> args;
    for (std::string& a : argv) args.push_back(a.data());
    args.push_back(nullptr);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

SubprocessBox::~SubprocessBox() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    int status = 0;
    ::waitpid(pid_, &status, 0);
  }
}

BoxResponse SubprocessBox::Respond(const Matrix& loss, double control, std::uint64_t seed) const {
  nlohmann::json req;
  req["loss"] = nlohmann::json::array();
  for (std::size_t s = 0; s < loss.rows(); ++s) {
    req["loss"].push_back(std::vector<double>(loss.row(s).begin(), loss.row(s).end()));
  }
  req["control"] = control;
  req["seed"] = seed;
  WriteAll(to_child_, req.dump() + "\n");

  std::size_t pos;
  while ((pos = buffer_.find('\n')) == std::string::npos) {
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw NumericFailure("subprocess box: child closed its output");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
  const std::string line = buffer_.substr(0, pos);
  buffer_.erase(0, pos + 1);

  nlohmann::json resp;
  try {
    resp = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw NumericFailure(std::string("subprocess box: malformed response: ") + e.what());
  }
  BoxResponse out;
  try {
    if (resp.contains("rows")) {
      std::vector<std::vector<double>> rows = resp.at("rows").get<std::vector<std::vector<double>>>();
      out.rows = Matrix::FromRows(rows);
    } else if (resp.contains("samples")) {
      for (const auto& pair : resp.at("samples")) {
        out.samples.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<std::size_t>());
      }
    } else if (resp.contains("error")) {
      throw NumericFailure("subprocess box: " + resp.at("error").get<std::string>());
    } else {
      throw NumericFailure("subprocess box: response has neither rows nor samples");
    }
  } catch (const nlohmann::json::exception& e) {
    throw NumericFailure(std::string("subprocess box: bad response field: ") + e.what());
  }
  return out;
}

}  // namespace brh
