// voxkit/condense.hpp
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
//
// Condensation bundles detected event fragments into one dense audio file
// for efficient manual annotation, with a reversible index mapping every
// condensed instant back to (source_id, source time). Fragments are copied
// sample-exactly (no resampling, no gain); all interval arithmetic is done in
// integer samples so the mapping round-trips exactly.

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

struct CondensedSegment {
  TimeInterval condensed;  // contiguous, starting at 0
  std::string source_id;
  TimeInterval source;     // same duration as condensed
};

struct CondensedIndex {
  std::vector<CondensedSegment> entries;
  double total_condensed_s = 0.0;
  double total_source_s = 0.0;

  // Source location of a condensed instant.
  std::pair<std::string, double> map_to_source(double t_s) const {
    if (entries.empty() || t_s < 0.0 || t_s > total_condensed_s + 1e-12)
      throw BoundsError("map_to_source: time " + std::to_string(t_s) +
                        " outside condensed range [0, " +
                        std::to_string(total_condensed_s) + "]");
    // Last entry whose begin <= t.
    std::size_t lo = 0, hi = entries.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (entries[mid].condensed.begin_s <= t_s) lo = mid;
      else hi = mid;
    }
    const CondensedSegment& seg = entries[lo];
    return {seg.source_id, seg.source.begin_s + (t_s - seg.condensed.begin_s)};
  }

  // Condensed location of a source instant, when that instant was retained.
  std::optional<double> map_to_condensed(const std::string& source_id, double t_s) const {
    for (const CondensedSegment& seg : entries) {
      if (seg.source_id != source_id) continue;
      if (t_s >= seg.source.begin_s - 1e-12 && t_s <= seg.source.end_s + 1e-12)
        return seg.condensed.begin_s + (t_s - seg.source.begin_s);
    }
    return std::nullopt;
  }
};

// One recording with its detected events and its absolute start time (used
// only for chronological ordering of the fragments).
struct RecordingEvents {
  const AudioClip* clip = nullptr;
  double start_time_s = 0.0;
  std::vector<TimeInterval> events;
};

inline std::pair<AudioClip, CondensedIndex> condense(std::vector<RecordingEvents> inputs) {
  if (inputs.empty()) throw PreconditionError("condense: no recordings");
  int rate = inputs.front().clip->sample_rate;
  for (const RecordingEvents& in : inputs) {
    if (in.clip == nullptr) throw PreconditionError("condense: null clip");
    if (in.clip->sample_rate != rate)
      throw PreconditionError("condense: mixed sample rates");
  }
  std::stable_sort(inputs.begin(), inputs.end(),
                   [](const RecordingEvents& a, const RecordingEvents& b) {
                     if (a.start_time_s != b.start_time_s)
                       return a.start_time_s < b.start_time_s;
                     return a.clip->source_id < b.clip->source_id;
                   });

  AudioClip out;
  out.sample_rate = rate;
  out.source_id = "condensed";
  CondensedIndex index;

  std::int64_t cursor = 0;
  for (const RecordingEvents& in : inputs) {
    const AudioClip& clip = *in.clip;
    std::vector<TimeInterval> events = in.events;
    std::sort(events.begin(), events.end(),
              [](const TimeInterval& a, const TimeInterval& b) { return a.begin_s < b.begin_s; });
    for (const TimeInterval& ev : events) {
      if (!ev.valid())
        throw BoundsError("condense: invalid interval [" + std::to_string(ev.begin_s) +
                          ", " + std::to_string(ev.end_s) + ") on " + clip.source_id);
      std::int64_t b = sample_index(ev.begin_s, rate);
      std::int64_t e = sample_index(ev.end_s, rate);
      if (b < 0 || e > static_cast<std::int64_t>(clip.samples.size()))
        throw BoundsError("condense: interval [" + std::to_string(ev.begin_s) + ", " +
                          std::to_string(ev.end_s) + ") s beyond recording " +
                          clip.source_id + " (" + std::to_string(clip.duration_s()) + " s)");
      if (e <= b) continue;
      out.samples.insert(out.samples.end(), clip.samples.begin() + b, clip.samples.begin() + e);

      CondensedSegment seg;
      seg.source_id = clip.source_id;
      seg.condensed.begin_s = static_cast<double>(cursor) / rate;
      seg.condensed.end_s = static_cast<double>(cursor + (e - b)) / rate;
      seg.source.begin_s = static_cast<double>(b) / rate;
      seg.source.end_s = static_cast<double>(e) / rate;
      index.entries.push_back(seg);
      cursor += e - b;
    }
    index.total_source_s += clip.duration_s();
  }
  index.total_condensed_s = static_cast<double>(cursor) / rate;
  return {std::move(out), std::move(index)};
}

// Maps annotations made on the condensed file back to source time. An
// annotation spanning a fragment boundary is split at the boundary into one
// annotation per fragment, all carrying the original label.
inline std::vector<Annotation> lift_annotations(const std::vector<Annotation>& condensed_annotations,
                                                const CondensedIndex& index) {
  std::vector<Annotation> out;
  for (const Annotation& a : condensed_annotations) {
    if (a.interval.begin_s < -1e-12 || a.interval.end_s > index.total_condensed_s + 1e-9)
      throw BoundsError("lift_annotations: [" + std::to_string(a.interval.begin_s) + ", " +
                        std::to_string(a.interval.end_s) + ") outside condensed duration " +
                        std::to_string(index.total_condensed_s));
    for (const CondensedSegment& seg : index.entries) {
      double lo = std::max(a.interval.begin_s, seg.condensed.begin_s);
      double hi = std::min(a.interval.end_s, seg.condensed.end_s);
      if (hi <= lo) continue;
      Annotation piece = a;
      piece.source_id = seg.source_id;
      piece.interval.begin_s = seg.source.begin_s + (lo - seg.condensed.begin_s);
      piece.interval.end_s = seg.source.begin_s + (hi - seg.condensed.begin_s);
      out.push_back(std::move(piece));
    }
  }
  return out;
}

// Inverse direction: source-time annotations into condensed time, split per
// retained fragment. Annotations over audio that was not retained produce no
// output pieces.
inline std::vector<Annotation> project_annotations(const std::vector<Annotation>& source_annotations,
                                                   const CondensedIndex& index) {
  std::vector<Annotation> out;
  for (const Annotation& a : source_annotations) {
    for (const CondensedSegment& seg : index.entries) {
      if (seg.source_id != a.source_id) continue;
      double lo = std::max(a.interval.begin_s, seg.source.begin_s);
      double hi = std::min(a.interval.end_s, seg.source.end_s);
      if (hi <= lo) continue;
      Annotation piece = a;
      piece.source_id = a.source_id;
      piece.interval.begin_s = seg.condensed.begin_s + (lo - seg.source.begin_s);
      piece.interval.end_s = seg.condensed.begin_s + (hi - seg.source.begin_s);
      out.push_back(std::move(piece));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Index persistence (TSV, columns documented in docs/formats.md).

inline void write_index_tsv(const CondensedIndex& index, const std::string& path) {
  std::string out =
      "condensed_begin_s\tcondensed_end_s\tsource_id\tsource_begin_s\tsource_end_s\n";
  for (const CondensedSegment& seg : index.entries) {
    out += format_double(seg.condensed.begin_s) + "\t" + format_double(seg.condensed.end_s) +
           "\t" + seg.source_id + "\t" + format_double(seg.source.begin_s) + "\t" +
           format_double(seg.source.end_s) + "\n";
  }
  write_file_atomic(path, out);
}

inline CondensedIndex read_index_tsv(const std::string& path) {
  Table t = read_table(path, '\t');
  for (const char* col : {"condensed_begin_s", "condensed_end_s", "source_id",
                          "source_begin_s", "source_end_s"}) {
    if (t.column(col) < 0)
      throw SchemaError(std::string("index file missing column '") + col + "': " + path);
  }
  int cb = t.column("condensed_begin_s"), ce = t.column("condensed_end_s");
  int sid = t.column("source_id");
  int sb = t.column("source_begin_s"), se = t.column("source_end_s");
  CondensedIndex index;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::string where = path + " row " + std::to_string(r + 1);
    CondensedSegment seg;
    seg.condensed.begin_s = parse_double(row[static_cast<std::size_t>(cb)], where);
    seg.condensed.end_s = parse_double(row[static_cast<std::size_t>(ce)], where);
    seg.source_id = row[static_cast<std::size_t>(sid)];
    seg.source.begin_s = parse_double(row[static_cast<std::size_t>(sb)], where);
    seg.source.end_s = parse_double(row[static_cast<std::size_t>(se)], where);
    index.entries.push_back(std::move(seg));
  }
  if (!index.entries.empty()) index.total_condensed_s = index.entries.back().condensed.end_s;
  return index;
}

}  // namespace voxkit
