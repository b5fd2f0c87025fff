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

#include "narrkit/context.h"

#include <algorithm>
#include <optional>

#include "json_lines.h"

namespace narrkit {
namespace {

using internal::Json;

std::vector<std::size_t> StepRange(std::size_t first, std::size_t count) {
  std::vector<std::size_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
  return out;
}

ConditioningWindow MakeWindow(const NarrativeSequence& sequence,
                              std::size_t window_index, int k,
                              std::vector<std::size_t> references,
                              std::vector<std::size_t> targets, bool partial) {
  ConditioningWindow w;
  w.sequence_id = sequence.sequence_id;
  w.window_index = window_index;
  w.k = k;
  for (std::size_t t : references) {
    const StepRecord& step = sequence.steps[t - 1];
    w.reference_frames.push_back(step.keyframe);
    w.reference_embeddings.push_back(step.embedding);
  }
  for (std::size_t t : targets) {
    const StepRecord& step = sequence.steps[t - 1];
    w.target_frames.push_back(step.keyframe);
    w.target_embeddings.push_back(step.embedding);
  }
  // Every step the window touches, once, in temporal order.
  std::vector<std::string> captions;
  for (std::size_t t = references.front(); t <= targets.back(); ++t) {
    captions.push_back(sequence.steps[t - 1].caption);
  }
  w.tiled_caption = TileCaptions(captions);
  w.reference_steps = std::move(references);
  w.target_steps = std::move(targets);
  w.partial = partial;
  return w;
}

std::optional<TrainingRecord::Block> ParseBlock(const std::string& name) {
  if (name == "action") return TrainingRecord::Block::kAction;
  if (name == "caption") return TrainingRecord::Block::kCaption;
  if (name == "embedding") return TrainingRecord::Block::kEmbedding;
  return std::nullopt;
}

std::string OptionalString(const Json& record, const char* key,
                           std::size_t line) {
  auto it = record.find(key);
  if (it == record.end() || it->is_null()) return {};
  if (!it->is_string()) throw ParseError(line, key, "expected a string");
  return it->get<std::string>();
}

}  // namespace

void NarrativeSequence::Validate() const {
  if (steps.empty()) {
    throw DataError("sequence '" + sequence_id + "' has no steps");
  }
  if (context_window == 0) {
    throw DataError("sequence '" + sequence_id +
                    "': context window must be positive");
  }
  std::size_t dim = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].index != i + 1) {
      throw DataError("sequence '" + sequence_id + "': step " +
                      std::to_string(i + 1) + " carries index " +
                      std::to_string(steps[i].index));
    }
    const std::size_t d = steps[i].embedding.dim();
    if (d == 0) continue;
    if (dim == 0) dim = d;
    if (d != dim) {
      throw DataError("sequence '" + sequence_id +
                      "': embedding dimensions differ across steps");
    }
  }
}

HistoryRecord BuildHistory(const NarrativeSequence& sequence, std::size_t t) {
  if (t < 1 || t > sequence.steps.size()) {
    throw DataError("history step " + std::to_string(t) + " outside 1.." +
                    std::to_string(sequence.steps.size()));
  }
  HistoryRecord h;
  h.t = t;
  for (std::size_t i = 0; i + 1 < t; ++i) {
    const StepRecord& step = sequence.steps[i];
    h.actions.push_back(step.action);
    h.captions.push_back(step.caption);
    h.embeddings.push_back(step.embedding);
  }
  return h;
}

std::string TileCaptions(std::span<const std::string> captions,
                         std::string_view separator) {
  if (captions.empty()) throw DataError("no captions to tile");
  std::string out = captions.front();
  for (std::size_t i = 1; i < captions.size(); ++i) {
    out += separator;
    out += captions[i];
  }
  return out;
}

std::vector<std::string> SplitTiledCaption(std::string_view tiled,
                                           std::string_view separator) {
  std::vector<std::string> parts;
  if (separator.empty()) {
    parts.emplace_back(tiled);
    return parts;
  }
  std::size_t begin = 0;
  for (;;) {
    const std::size_t pos = tiled.find(separator, begin);
    if (pos == std::string_view::npos) {
      parts.emplace_back(tiled.substr(begin));
      return parts;
    }
    parts.emplace_back(tiled.substr(begin, pos - begin));
    begin = pos + separator.size();
  }
}

std::vector<ConditioningWindow> BuildWindows(const NarrativeSequence& sequence,
                                             int k) {
  if (k < kMinContextLength || k > kMaxContextLength) {
    throw DataError("context length k must be in 1..3, got " +
                    std::to_string(k));
  }
  sequence.Validate();
  const std::size_t n = sequence.steps.size();
  const auto ku = static_cast<std::size_t>(k);
  if (n < 2 * ku) {
    throw DataError("sequence '" + sequence.sequence_id + "' has " +
                    std::to_string(n) + " steps; k = " + std::to_string(k) +
                    " needs at least " + std::to_string(2 * ku));
  }

  std::vector<ConditioningWindow> windows;
  std::size_t start = 1;
  for (; start + 2 * ku - 1 <= n; start += ku) {
    windows.push_back(MakeWindow(sequence, windows.size(), k,
                                 StepRange(start, ku),
                                 StepRange(start + ku, ku), false));
  }
  const std::size_t last_target = windows.back().target_steps.back();
  if (last_target < n) {
    windows.push_back(MakeWindow(sequence, windows.size(), k,
                                 windows.back().target_steps,
                                 StepRange(n - ku + 1, ku), true));
  }
  return windows;
}

const char* BlockName(TrainingRecord::Block block) {
  switch (block) {
    case TrainingRecord::Block::kAction:
      return "action";
    case TrainingRecord::Block::kCaption:
      return "caption";
    case TrainingRecord::Block::kEmbedding:
      return "embedding";
  }
  return "action";
}

std::vector<TrainingRecord> ExportTrainingRecords(
    const NarrativeSequence& sequence) {
  sequence.Validate();
  const std::size_t n = sequence.steps.size();
  const std::size_t first =
      n > sequence.context_window ? n - sequence.context_window : 0;
  std::vector<TrainingRecord> out;
  out.reserve(3 * (n - first));
  for (std::size_t i = first; i < n; ++i) {
    const StepRecord& step = sequence.steps[i];
    out.push_back({sequence.sequence_id, step.index,
                   TrainingRecord::Block::kAction, step.action, {}, {}});
    out.push_back({sequence.sequence_id, step.index,
                   TrainingRecord::Block::kCaption, step.caption, {}, {}});
    out.push_back({sequence.sequence_id, step.index,
                   TrainingRecord::Block::kEmbedding, {},
                   step.embedding.id.value_or(""), step.keyframe});
  }
  return out;
}

std::vector<StepRecord> StepsFromTrainingRecords(
    std::span<const TrainingRecord> records) {
  using Block = TrainingRecord::Block;
  if (records.size() % 3 != 0) {
    throw DataError("training records do not form whole steps");
  }
  std::vector<StepRecord> steps;
  for (std::size_t i = 0; i < records.size(); i += 3) {
    const TrainingRecord& a = records[i];
    const TrainingRecord& c = records[i + 1];
    const TrainingRecord& z = records[i + 2];
    if (a.block != Block::kAction || c.block != Block::kCaption ||
        z.block != Block::kEmbedding) {
      throw DataError("training records at " + std::to_string(i) +
                      " are not in action, caption, embedding order");
    }
    if (a.t != c.t || a.t != z.t || a.sequence_id != c.sequence_id ||
        a.sequence_id != z.sequence_id) {
      throw DataError("training record block at " + std::to_string(i) +
                      " mixes steps");
    }
    if (!steps.empty() && a.t != steps.back().index + 1) {
      throw DataError("training records skip from step " +
                      std::to_string(steps.back().index) + " to " +
                      std::to_string(a.t));
    }
    StepRecord step;
    step.index = a.t;
    step.action = a.text;
    step.caption = c.text;
    if (!z.embedding_id.empty()) step.embedding.id = z.embedding_id;
    step.keyframe = z.keyframe;
    steps.push_back(std::move(step));
  }
  return steps;
}

std::vector<NarrativeSequence> ParseSequences(std::istream& in,
                                              std::size_t context_window) {
  std::map<std::string, std::map<std::size_t, StepRecord>> grouped;
  internal::ForEachJsonLine(in, [&](std::size_t line, const Json& record) {
    const std::string id = internal::RequireString(record, "sequence_id", line);
    const std::int64_t t = internal::RequireInteger(record, "t", line);
    if (t < 1) throw ParseError(line, "t", "step index must be >= 1");
    StepRecord step;
    step.index = static_cast<std::size_t>(t);
    step.action = internal::RequireString(record, "action", line);
    step.caption = internal::RequireString(record, "caption", line);
    if (std::string ref = OptionalString(record, "embedding_id", line);
        !ref.empty()) {
      step.embedding.id = std::move(ref);
    }
    step.keyframe = OptionalString(record, "keyframe", line);
    if (!grouped[id].emplace(step.index, std::move(step)).second) {
      throw ParseError(line, "t",
                       "duplicate step " + std::to_string(t) +
                           " in sequence '" + id + "'");
    }
  });

  std::vector<NarrativeSequence> sequences;
  for (auto& [id, steps] : grouped) {
    NarrativeSequence seq;
    seq.sequence_id = id;
    seq.context_window = context_window;
    for (auto& [t, step] : steps) seq.steps.push_back(std::move(step));
    seq.Validate();
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

std::vector<NarrativeSequence> SequencesFromManifest(
    const DatasetManifest& manifest,
    const std::map<std::pair<std::string, std::string>,
                   std::vector<std::size_t>>& assignment,
    std::size_t context_window) {
  std::vector<NarrativeSequence> sequences;
  for (const auto& [video_id, video] : manifest.videos) {
    auto actions_it = manifest.actions.find(video_id);
    NarrativeSequence seq;
    seq.sequence_id = video_id;
    seq.context_window = context_window;
    for (const ClipRecord& clip : video.clips) {
      auto found = assignment.find({video_id, clip.clip_id});
      if (found == assignment.end() || found->second.empty()) continue;
      StepRecord step;
      step.index = seq.steps.size() + 1;
      for (std::size_t index : found->second) {
        if (actions_it == manifest.actions.end() ||
            index >= actions_it->second.size()) {
          throw DataError("assignment for clip '" + clip.clip_id +
                          "' names unknown action " + std::to_string(index));
        }
        if (!step.action.empty()) step.action += ' ';
        step.action += actions_it->second[index].description;
      }
      step.caption = clip.caption;
      step.embedding.id = video_id + "/" + clip.clip_id;
      step.keyframe = video_id + "/" + clip.clip_id;
      seq.steps.push_back(std::move(step));
    }
    if (!seq.steps.empty()) sequences.push_back(std::move(seq));
  }
  return sequences;
}

std::size_t WriteWindows(const std::vector<ConditioningWindow>& windows,
                         std::ostream& out) {
  std::size_t bytes = 0;
  for (const ConditioningWindow& w : windows) {
    Json reference_ids = Json::array();
    Json target_ids = Json::array();
    for (const auto& e : w.reference_embeddings) {
      reference_ids.push_back(e.id ? Json(*e.id) : Json(nullptr));
    }
    for (const auto& e : w.target_embeddings) {
      target_ids.push_back(e.id ? Json(*e.id) : Json(nullptr));
    }
    bytes += internal::WriteJsonLine(
        out,
        Json{{"sequence_id", w.sequence_id},
             {"window_index", w.window_index},
             {"k", w.k},
             {"ref_step_indices", w.reference_steps},
             {"target_step_indices", w.target_steps},
             {"tiled_caption", w.tiled_caption},
             {"embedding_ids",
              {{"reference", reference_ids}, {"target", target_ids}}},
             {"reference_frames", w.reference_frames},
             {"target_frames", w.target_frames},
             {"partial", w.partial}});
  }
  out.flush();
  if (!out) throw IoError("write failure");
  return bytes;
}

std::size_t WriteTrainingRecords(const std::vector<TrainingRecord>& records,
                                 std::ostream& out) {
  std::size_t bytes = 0;
  for (const TrainingRecord& r : records) {
    Json record = {{"sequence_id", r.sequence_id},
                   {"t", r.t},
                   {"block", BlockName(r.block)}};
    if (r.block == TrainingRecord::Block::kEmbedding) {
      record["embedding_id"] = r.embedding_id;
      record["keyframe"] = r.keyframe;
      record["loss"] = "regression";
    } else {
      record["text"] = r.text;
      record["loss"] = "cross_entropy";
    }
    bytes += internal::WriteJsonLine(out, record);
  }
  out.flush();
  if (!out) throw IoError("write failure");
  return bytes;
}

std::vector<TrainingRecord> ParseTrainingRecords(std::istream& in) {
  std::vector<TrainingRecord> records;
  internal::ForEachJsonLine(in, [&](std::size_t line, const Json& record) {
    TrainingRecord r;
    r.sequence_id = internal::RequireString(record, "sequence_id", line);
    const std::int64_t t = internal::RequireInteger(record, "t", line);
    if (t < 1) throw ParseError(line, "t", "step index must be >= 1");
    r.t = static_cast<std::size_t>(t);
    auto block = ParseBlock(internal::RequireString(record, "block", line));
    if (!block) throw ParseError(line, "block", "unknown block kind");
    r.block = *block;
    if (r.block == TrainingRecord::Block::kEmbedding) {
      r.embedding_id = OptionalString(record, "embedding_id", line);
      r.keyframe = OptionalString(record, "keyframe", line);
    } else {
      r.text = internal::RequireString(record, "text", line);
    }
    records.push_back(std::move(r));
  });
  return records;
}

}  // namespace narrkit
