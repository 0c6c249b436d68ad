// Copyright 2026 The b2t Authors. All Rights Reserved.
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

namespace b2t {

/// Base class of every exception thrown by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on caller-supplied data was violated.
class invalid_input_error : public error {
 public:
  using error::error;
};

/// A file or response could not be parsed. `line()` is 1-based, 0 when the
/// input is not line oriented.
class parse_error : public error {
 public:
  parse_error(const std::string& what, std::size_t line = 0)
      : error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A remote language-model call failed after all retries.
class service_error : public error {
 public:
  service_error(const std::string& what, int status, int attempts)
      : error(what + " (status " + std::to_string(status) + ", " +
              std::to_string(attempts) + " attempt" +
              (attempts == 1 ? "" : "s") + ")"),
        status_(status),
        attempts_(attempts) {}

  /// HTTP status of the last attempt, or -1 for transport failures.
  int status() const noexcept { return status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int status_;
  int attempts_;
};

/// Correlation requested over a vector with zero variance.
class undefined_correlation_error : public error {
 public:
  using error::error;
};

}  // namespace b2t
