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

#ifndef BRH_ERRORS_HPP_
#define BRH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace brh {

// Base of every error raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operation not defined for this object (e.g. f' of a kinked generator).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

// Value lies above the attainable range of a monotone map.
class SaturationError : public Error {
 public:
  SaturationError(const std::string& what, double boundary)
      : Error(what), boundary_(boundary) {}
  double boundary() const { return boundary_; }

 private:
  double boundary_;
};

// Iterative method failed (bracketing, divergence, singular system).
class NumericFailure : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace brh

#endif  // BRH_ERRORS_HPP_
