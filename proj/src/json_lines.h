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

// Helpers shared by the line-delimited JSON readers and writers.

#ifndef NARRKIT_SRC_JSON_LINES_H_
#define NARRKIT_SRC_JSON_LINES_H_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "json.hpp"
#include "narrkit/errors.h"

namespace narrkit::internal {

using Json = nlohmann::json;

// Invokes fn(line_number, record) for every non-blank line. Line numbers are
// 1-based. Every record must be a JSON object.
template <typename Fn>
void ForEachJsonLine(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::exception& e) {
      throw ParseError(line_number, "", std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) {
      throw ParseError(line_number, "", "record is not an object");
    }
    fn(line_number, record);
  }
  if (in.bad()) throw IoError("read failure");
}

inline const Json& RequireField(const Json& record, const char* key,
                                std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) {
    throw ParseError(line, key, "missing");
  }
  return *it;
}

inline std::string RequireString(const Json& record, const char* key,
                                 std::size_t line) {
  const Json& value = RequireField(record, key, line);
  if (!value.is_string()) throw ParseError(line, key, "expected a string");
  return value.get<std::string>();
}

inline double AsFiniteNumber(const Json& value, const char* key,
                             std::size_t line) {
  if (!value.is_number()) throw ParseError(line, key, "expected a number");
  double result = value.get<double>();
  if (!std::isfinite(result)) throw ParseError(line, key, "not finite");
  return result;
}

inline double RequireNumber(const Json& record, const char* key,
                            std::size_t line) {
  return AsFiniteNumber(RequireField(record, key, line), key, line);
}

inline std::optional<double> OptionalNumber(const Json& record, const char* key,
                                            std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  return AsFiniteNumber(*it, key, line);
}

inline std::int64_t AsInteger(const Json& value, const char* key,
                              std::size_t line) {
  if (!value.is_number_integer()) {
    throw ParseError(line, key, "expected an integer");
  }
  return value.get<std::int64_t>();
}

inline std::int64_t RequireInteger(const Json& record, const char* key,
                                   std::size_t line) {
  return AsInteger(RequireField(record, key, line), key, line);
}

inline std::optional<std::int64_t> OptionalInteger(const Json& record,
                                                   const char* key,
                                                   std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return std::nullopt;
  return AsInteger(*it, key, line);
}

// Serializes one record followed by a newline. Returns the bytes written.
inline std::size_t WriteJsonLine(std::ostream& out, const Json& record) {
  std::string text = record.dump();
  text.push_back('\n');
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failure");
  return text.size();
}

inline std::ifstream OpenInput(const std::string& path,
                               std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream OpenOutput(const std::string& path,
                                std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace narrkit::internal

#endif  // NARRKIT_SRC_JSON_LINES_H_
