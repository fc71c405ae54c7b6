// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISKMECH_ERRORS_HPP_
#define RISKMECH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace riskmech {

// Invalid arguments, malformed instances, shape mismatches. Maps to CLI
// exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// An exact computation was requested from a mechanism that can only be
// sampled. Maps to CLI exit code 2.
class UnsupportedMethodError : public std::runtime_error {
 public:
  explicit UnsupportedMethodError(const std::string& what)
      : std::runtime_error(what) {}
};

// The optimizer hit its iteration cap before reaching the requested
// residual. Maps to CLI exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Instance file rejected. Carries a stable diagnostic code ("bad-json",
// "unknown-field", "prior-not-normalized", ...) and the JSON path of the
// offending field. Maps to CLI exit code 2.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& code, const std::string& where,
             const std::string& what)
      : std::runtime_error(code + " at " + where + ": " + what),
        code_(code),
        where_(where) {}
  const std::string& code() const { return code_; }
  const std::string& where() const { return where_; }

 private:
  std::string code_;
  std::string where_;
};

}  // namespace riskmech

#endif  // RISKMECH_ERRORS_HPP_
