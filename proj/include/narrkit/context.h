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

#ifndef NARRKIT_CONTEXT_H_
#define NARRKIT_CONTEXT_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "narrkit/embedding.h"
#include "narrkit/manifest.h"

namespace narrkit {

// One step t of a narrative: action a_t, caption c_t, visual latent z_t and
// keyframe I_t. The embedding may be a bare reference (id only, no values).
struct StepRecord {
  std::size_t index = 0;  // 1-based
  std::string action;
  std::string caption;
  EmbeddingVector embedding;
  std::string keyframe;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

inline constexpr std::size_t kDefaultContextWindow = 8;

struct NarrativeSequence {
  std::string sequence_id;
  std::vector<StepRecord> steps;
  // Number of most recent steps kept in a training record.
  std::size_t context_window = kDefaultContextWindow;

  // Throws DataError unless there is at least one step, indices run 1..n,
  // the context window is positive, and embeddings that carry values share
  // one dimension.
  void Validate() const;
};

// Everything generated before step t: a_{1:t-1}, c_{1:t-1}, z_{1:t-1}.
struct HistoryRecord {
  std::size_t t = 0;
  std::vector<std::string> actions;
  std::vector<std::string> captions;
  std::vector<EmbeddingVector> embeddings;
};

// Throws DataError unless 1 <= t <= steps.size().
HistoryRecord BuildHistory(const NarrativeSequence& sequence, std::size_t t);

inline constexpr std::string_view kDefaultTileSeparator = "\n";

// Joins captions in temporal order. Throws DataError on an empty list.
std::string TileCaptions(std::span<const std::string> captions,
                         std::string_view separator = kDefaultTileSeparator);
std::vector<std::string> SplitTiledCaption(
    std::string_view tiled, std::string_view separator = kDefaultTileSeparator);

inline constexpr int kMinContextLength = 1;
inline constexpr int kMaxContextLength = 3;

// k reference frames conditioning k target frames, plus the tiled caption of
// every step the window touches.
struct ConditioningWindow {
  std::string sequence_id;
  std::size_t window_index = 0;
  int k = 0;
  std::vector<std::size_t> reference_steps;
  std::vector<std::size_t> target_steps;
  std::string tiled_caption;
  std::vector<std::string> reference_frames;
  std::vector<std::string> target_frames;
  std::vector<EmbeddingVector> reference_embeddings;
  std::vector<EmbeddingVector> target_embeddings;
  // True for a trailing window whose targets overlap its references because
  // fewer than k new steps remained.
  bool partial = false;
};

// Rolling windows with stride k. Window i covers steps [1 + ik, 2k + ik]; its
// targets are the next window's references. When n - 2k is not a multiple of
// k, one final partial window takes the previous targets as references and
// the last k steps as targets. Throws DataError if k is outside 1..3 or the
// sequence has fewer than 2k steps.
std::vector<ConditioningWindow> BuildWindows(const NarrativeSequence& sequence,
                                             int k);

// One interleaved supervision block.
struct TrainingRecord {
  enum class Block { kAction, kCaption, kEmbedding };

  std::string sequence_id;
  std::size_t t = 0;
  Block block = Block::kAction;
  // Action or caption text; empty for embedding blocks.
  std::string text;
  // Embedding blocks only.
  std::string embedding_id;
  std::string keyframe;
};

const char* BlockName(TrainingRecord::Block block);

// Emits action, caption and embedding blocks for each of the last
// context_window steps, in step order.
std::vector<TrainingRecord> ExportTrainingRecords(
    const NarrativeSequence& sequence);

// Inverse of ExportTrainingRecords for a single sequence: rebuilds the steps
// (embedding values are not carried by the export). Throws DataError if the
// blocks are out of order or incomplete.
std::vector<StepRecord> StepsFromTrainingRecords(
    std::span<const TrainingRecord> records);

// Line-delimited step records {sequence_id, t, action, caption,
// embedding_id?, keyframe?}, grouped into sequences ordered by id.
std::vector<NarrativeSequence> ParseSequences(
    std::istream& in, std::size_t context_window = kDefaultContextWindow);

// One sequence per video, one step per clip that has an assigned action. The
// step's action text joins the assigned descriptions with a space; embedding
// and keyframe references are "video_id/clip_id".
std::vector<NarrativeSequence> SequencesFromManifest(
    const DatasetManifest& manifest,
    const std::map<std::pair<std::string, std::string>,
                   std::vector<std::size_t>>& assignment,
    std::size_t context_window = kDefaultContextWindow);

std::size_t WriteWindows(const std::vector<ConditioningWindow>& windows,
                         std::ostream& out);
std::size_t WriteTrainingRecords(const std::vector<TrainingRecord>& records,
                                 std::ostream& out);
std::vector<TrainingRecord> ParseTrainingRecords(std::istream& in);

}  // namespace narrkit

#endif  // NARRKIT_CONTEXT_H_
