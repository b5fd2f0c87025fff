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

#include "narrkit/embedding.h"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <iterator>
#include <limits>
#include <ostream>
#include <sstream>

#include "json_lines.h"

namespace narrkit {
namespace {

using internal::Json;

constexpr std::array<char, 4> kMagic = {'E', 'M', 'B', '1'};

void PutU32(std::string& buf, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    buf.push_back(static_cast<char>((v >> shift) & 0xffu));
  }
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

EmbeddingSet ParseBinary(const std::string& data) {
  constexpr std::size_t kHeader = 12;
  if (data.size() < kHeader) throw DataError("embedding file: truncated header");
  const auto* bytes = reinterpret_cast<const unsigned char*>(data.data());
  const std::uint32_t count = GetU32(bytes + 4);
  const std::uint32_t dim = GetU32(bytes + 8);
  if (count > 0 && dim == 0) {
    throw DataError("embedding file: dimension must be at least 1");
  }
  const std::uint64_t payload = std::uint64_t{count} * dim * 4;
  if (data.size() - kHeader < payload) {
    throw DataError("embedding file: expected " + std::to_string(payload) +
                    " payload bytes, found " +
                    std::to_string(data.size() - kHeader));
  }

  EmbeddingSet set(count);
  const unsigned char* p = bytes + kHeader;
  for (std::uint32_t i = 0; i < count; ++i) {
    set[i].values.resize(dim);
    for (std::uint32_t j = 0; j < dim; ++j, p += 4) {
      const float f = std::bit_cast<float>(GetU32(p));
      if (!std::isfinite(f)) {
        throw DataError("embedding file: non-finite value in row " +
                        std::to_string(i));
      }
      set[i].values[j] = f;
    }
  }

  std::string tail = data.substr(kHeader + payload);
  if (tail.empty()) return set;
  if (tail.back() == '\n') tail.pop_back();
  std::vector<std::string> ids;
  std::istringstream lines(tail);
  for (std::string id; std::getline(lines, id);) ids.push_back(id);
  if (ids.size() != count) {
    throw DataError("embedding file: " + std::to_string(ids.size()) +
                    " ids for " + std::to_string(count) + " vectors");
  }
  for (std::uint32_t i = 0; i < count; ++i) set[i].id = std::move(ids[i]);
  return set;
}

EmbeddingSet ParseText(std::istream& in) {
  EmbeddingSet set;
  internal::ForEachJsonLine(in, [&](std::size_t line, const Json& record) {
    EmbeddingVector v;
    if (auto it = record.find("id"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(line, "id", "expected a string");
      v.id = it->get<std::string>();
    }
    const Json& values = internal::RequireField(record, "values", line);
    if (!values.is_array() || values.empty()) {
      throw ParseError(line, "values", "expected a non-empty array");
    }
    v.values.reserve(values.size());
    for (const Json& x : values) {
      v.values.push_back(internal::AsFiniteNumber(x, "values", line));
    }
    if (!set.empty() && set.front().dim() != v.dim()) {
      throw ParseError(line, "values",
                       "dimension " + std::to_string(v.dim()) +
                           " differs from " + std::to_string(set.front().dim()));
    }
    set.push_back(std::move(v));
  });
  return set;
}

}  // namespace

std::size_t CheckedDimension(const EmbeddingSet& set) {
  if (set.empty()) throw DataError("embedding set is empty");
  const std::size_t dim = set.front().dim();
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (set[i].dim() == 0) throw DataError("embedding has dimension 0");
    if (set[i].dim() != dim) {
      throw DataError("embedding " + std::to_string(i) + " has dimension " +
                      std::to_string(set[i].dim()) + ", expected " +
                      std::to_string(dim));
    }
    for (double x : set[i].values) {
      if (!std::isfinite(x)) {
        throw DataError("embedding " + std::to_string(i) +
                        " has a non-finite value");
      }
    }
  }
  return dim;
}

std::size_t WriteEmbeddingsBinary(const EmbeddingSet& set, std::ostream& out) {
  const std::size_t dim = set.empty() ? 0 : CheckedDimension(set);
  if (set.size() > std::numeric_limits<std::uint32_t>::max() ||
      dim > std::numeric_limits<std::uint32_t>::max()) {
    throw DataError("embedding set too large for the binary format");
  }
  std::size_t with_ids = 0;
  for (const auto& v : set) {
    if (!v.id) continue;
    if (v.id->find('\n') != std::string::npos) {
      throw DataError("embedding id contains a newline");
    }
    ++with_ids;
  }

  std::string buf(kMagic.begin(), kMagic.end());
  buf.reserve(12 + set.size() * dim * 4);
  PutU32(buf, static_cast<std::uint32_t>(set.size()));
  PutU32(buf, static_cast<std::uint32_t>(dim));
  for (const auto& v : set) {
    for (double x : v.values) {
      const auto f = static_cast<float>(x);
      if (!std::isfinite(f)) {
        throw DataError("embedding value out of float32 range");
      }
      PutU32(buf, std::bit_cast<std::uint32_t>(f));
    }
  }
  if (!set.empty() && with_ids == set.size()) {
    for (const auto& v : set) {
      buf += *v.id;
      buf.push_back('\n');
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) throw IoError("write failure");
  return buf.size();
}

std::size_t WriteEmbeddingsText(const EmbeddingSet& set, std::ostream& out) {
  if (!set.empty()) CheckedDimension(set);
  std::size_t bytes = 0;
  for (const auto& v : set) {
    Json record;
    if (v.id) record["id"] = *v.id;
    record["values"] = v.values;
    bytes += internal::WriteJsonLine(out, record);
  }
  out.flush();
  if (!out) throw IoError("write failure");
  return bytes;
}

EmbeddingSet ReadEmbeddings(std::istream& in) {
  std::string data{std::istreambuf_iterator<char>(in),
                   std::istreambuf_iterator<char>()};
  if (in.bad()) throw IoError("read failure");
  if (data.size() >= kMagic.size() &&
      std::memcmp(data.data(), kMagic.data(), kMagic.size()) == 0) {
    return ParseBinary(data);
  }
  std::istringstream text(data);
  return ParseText(text);
}

EmbeddingSet ReadEmbeddingFile(const std::string& path) {
  auto in = internal::OpenInput(path, std::ios::in | std::ios::binary);
  try {
    return ReadEmbeddings(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::size_t WriteEmbeddingFile(const EmbeddingSet& set, const std::string& path,
                               EmbeddingFormat format) {
  auto out = internal::OpenOutput(path, std::ios::out | std::ios::binary);
  return format == EmbeddingFormat::kBinary ? WriteEmbeddingsBinary(set, out)
                                            : WriteEmbeddingsText(set, out);
}

}  // namespace narrkit
