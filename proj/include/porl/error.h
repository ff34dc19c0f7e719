// Copyright 2026 The PORL Dynamics Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PORL_ERROR_H_
#define PORL_ERROR_H_

#include <stdexcept>
#include <string>

namespace porl {

// Base class for every error raised by the library. Each subclass maps onto
// one failure category so callers (notably the CLI) can pick an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two densities (or a density and a value vector) live on different supports.
class SupportMismatchError : public Error {
 public:
  using Error::Error;
};

// Invalid hyper-parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A requested configuration is well-formed but deliberately not supported.
class UnsupportedConfigError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Non-finite or out-of-range numeric input.
class ValueError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of a function (e.g. |a| >= 1 for
// a tanh-squashed policy).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A payoff kernel produced a non-finite value.
class KernelDomainError : public Error {
 public:
  using Error::Error;
};

// Malformed game model, e.g. a transition row that is not a distribution.
class ModelError : public Error {
 public:
  using Error::Error;
};

// An iterative solver ran out of budget before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

}  // namespace porl

#endif  // PORL_ERROR_H_
