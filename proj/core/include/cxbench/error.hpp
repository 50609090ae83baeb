// Copyright 2026 The cxbench Authors
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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cxbench {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes (configuration and query errors are usage errors, everything
/// else is a data error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed XML or a document that violates the warehouse grammar.
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A fact references a dimension instance that does not exist.
class ReferentialError : public Error {
 public:
  using Error::Error;
};

/// A dimension instance does not conform to its schema.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Non-strictness requested on a dimension that cannot be multi-valued.
class EligibilityError : public Error {
 public:
  using Error::Error;
};

class QueryError : public Error {
 public:
  using Error::Error;
};

/// The in-memory oracle was asked to materialize too large a warehouse.
class OracleScopeError : public Error {
 public:
  using Error::Error;
};

}  // namespace cxbench
