// voxkit/chunks.hpp
//
// Copyright 2026  The voxkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <string>

#include "voxkit/core.hpp"
#include "voxkit/manifest.hpp"
#include "voxkit/wave.hpp"

namespace voxkit {

// Loads recordings on demand and keeps them for the lifetime of one command.
class ClipCache {
 public:
  explicit ClipCache(const CorpusManifest& manifest) : manifest_(manifest) {}

  const AudioClip& get(const std::string& source_id) {
    auto it = cache_.find(source_id);
    if (it != cache_.end()) return it->second;
    const RecordingInfo* rec = manifest_.find(source_id);
    if (!rec) throw ReferenceError("unknown source_id '" + source_id + "'");
    AudioClip clip = read_wave(manifest_.resolve_path(*rec));
    clip.source_id = source_id;
    return cache_.emplace(source_id, std::move(clip)).first->second;
  }

 private:
  const CorpusManifest& manifest_;
  std::map<std::string, AudioClip> cache_;
};

// Sample-exact slice of a recording; source_offset_s records where the chunk
// came from.
inline AudioClip slice_clip(const AudioClip& recording, const TimeInterval& interval) {
  std::int64_t b = sample_index(interval.begin_s, recording.sample_rate);
  std::int64_t e = sample_index(interval.end_s, recording.sample_rate);
  if (b < 0 || e > static_cast<std::int64_t>(recording.samples.size()) || e <= b)
    throw BoundsError("chunk [" + std::to_string(interval.begin_s) + ", " +
                      std::to_string(interval.end_s) + ") s outside recording " +
                      recording.source_id);
  AudioClip chunk;
  chunk.sample_rate = recording.sample_rate;
  chunk.source_id = recording.source_id;
  chunk.source_offset_s = static_cast<double>(b) / recording.sample_rate;
  chunk.samples.assign(recording.samples.begin() + b, recording.samples.begin() + e);
  return chunk;
}

}  // namespace voxkit
