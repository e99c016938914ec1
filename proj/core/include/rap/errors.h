// Copyright 2026 The RAP Authors
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

#ifndef RAP_ERRORS_H_
#define RAP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace rap {

// Bad input from a caller or a file: malformed rows, out-of-range arguments.
// The CLI maps this family to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ShapeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// API misuse detected at runtime (backward on a detached value, Adam step
// without gradients).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A hidden attribute label was read by a code path that must not see it.
class LeakageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN/Inf during training.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rap

#endif  // RAP_ERRORS_H_
