// Copyright 2026 The DRAGGN Authors.
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

#ifndef DRAGGN_ERRORS_H_
#define DRAGGN_ERRORS_H_

#include <stdexcept>
#include <string>

namespace draggn {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller broke a documented precondition (bad shapes, invalid state, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Malformed text input. Carries 1-based line/column when known (0 if not).
class ParseError : public Error {
 public:
  ParseError(const std::string &message, int line = 0, int column = 0);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// Reference to an object that does not exist (room id, model name, ...).
class LookupError : public Error {
 public:
  using Error::Error;
};

// Binding argument could not be resolved against the environment.
class GroundingError : public Error {
 public:
  using Error::Error;
};

// Value iteration hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string &message, double residual)
      : Error(message), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Invalid corpus specification or configuration.
class SpecError : public Error {
 public:
  using Error::Error;
};

// File system failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace draggn

#endif  // DRAGGN_ERRORS_H_
