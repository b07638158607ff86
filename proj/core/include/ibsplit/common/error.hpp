// Copyright 2026 The ibsplit Authors
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

#ifndef IBSPLIT_COMMON_ERROR_HPP_
#define IBSPLIT_COMMON_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace ibsplit {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tensor/matrix dimension mismatch; the message names both shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration rejected before any work starts.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value or other numeric breakdown during computation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (CSV schema, non-numeric cells, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure, message carries the offending path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ibsplit

#endif  // IBSPLIT_COMMON_ERROR_HPP_
