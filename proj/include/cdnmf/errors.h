// Copyright 2026 The CDNMF Authors
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

#ifndef CDNMF_ERRORS_H_
#define CDNMF_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cdnmf {

// Root of every error thrown by the library. The CLI maps each family to an
// exit code (data errors -> 2, numeric failures -> 3, config errors -> 1).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not conform, or a count is out of range.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input outside the mathematical domain of an operation (negative entry in
// an NMF target, asymmetric adjacency, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced during training or gradient evaluation.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Problems with on-disk inputs.
class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& file, int line, const std::string& what)
      : DataError(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ReferenceError : public DataError {
 public:
  using DataError::DataError;
};

class DuplicateError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace cdnmf

#endif  // CDNMF_ERRORS_H_
