// Copyright 2026 The mcm-avqa Authors
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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace avqa {

// Base of every error thrown by the library. The harness maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (even kernel width, empty range, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Input has no usable extent (T == 0, H*W == 0, all differences zero, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Zero variance where a correlation is required.
class ZeroVarianceError : public DegenerateInputError {
 public:
  using DegenerateInputError::DegenerateInputError;
};

// A documented precondition of an operation was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A function produced a non-finite value during evaluation.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Numerical fitting failed.
class FitError : public Error {
 public:
  using Error::Error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized data. Carries the byte offset where parsing stopped.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

}  // namespace avqa
