/*
 * Copyright 2026 The narrkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NARRKIT_ERRORS_H_
#define NARRKIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace narrkit {

// Raised for malformed or invariant-violating input data. The CLI maps it to
// exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A DataError tied to a position in a line-delimited input.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : DataError("line " + std::to_string(line) +
                  (field.empty() ? std::string() : ", field '" + field + "'") +
                  ": " + message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Failure writing to or reading from a stream or file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace narrkit

#endif  // NARRKIT_ERRORS_H_
