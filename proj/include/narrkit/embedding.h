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

#ifndef NARRKIT_EMBEDDING_H_
#define NARRKIT_EMBEDDING_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace narrkit {

// A dense visual or text latent. Kernels compute in double precision even
// though the binary file format stores 32-bit floats.
struct EmbeddingVector {
  std::vector<double> values;
  std::optional<std::string> id;

  std::size_t dim() const { return values.size(); }

  friend bool operator==(const EmbeddingVector&,
                         const EmbeddingVector&) = default;
};

using EmbeddingSet = std::vector<EmbeddingVector>;

// Returns the common dimension of a non-empty set. Throws DataError if the
// set is empty, a vector is empty or non-finite, or dimensions differ.
std::size_t CheckedDimension(const EmbeddingSet& set);

enum class EmbeddingFormat { kBinary, kText };

// Binary layout: "EMB1", u32 count, u32 dimension (little-endian), then
// count * dimension little-endian float32 values in row-major order,
// optionally followed by one id per line. Ids are written only when every
// vector has one. Returns the bytes written.
std::size_t WriteEmbeddingsBinary(const EmbeddingSet& set, std::ostream& out);

// One {"id": ..., "values": [...]} object per line.
std::size_t WriteEmbeddingsText(const EmbeddingSet& set, std::ostream& out);

// Detects the format from the leading magic bytes.
EmbeddingSet ReadEmbeddings(std::istream& in);

EmbeddingSet ReadEmbeddingFile(const std::string& path);
std::size_t WriteEmbeddingFile(const EmbeddingSet& set, const std::string& path,
                               EmbeddingFormat format);

}  // namespace narrkit

#endif  // NARRKIT_EMBEDDING_H_
