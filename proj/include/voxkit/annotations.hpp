// voxkit/annotations.hpp
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
// Raven-style selection tables: tab-separated, UTF-8, "." decimals, header
// row required. Required columns: Selection, Begin Time (s), End Time (s) and
// a label column (default "Species"). "Begin File" ties a row to a recording;
// when absent the manifest must contain exactly one recording. Unknown
// columns are ignored. Written tables use the identical dialect.

#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/manifest.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

struct SelectionTableOptions {
  std::string label_column = "Species";
  std::string file_column = "Begin File";
};

namespace annotation_detail {

// "Begin File" entries may carry the bare source_id, the wav file name, or a
// path; match against id and file stem.
inline const RecordingInfo* resolve_source(const CorpusManifest& manifest,
                                           const std::string& token) {
  if (const RecordingInfo* r = manifest.find(token)) return r;
  std::string stem = std::filesystem::path(token).stem().string();
  if (const RecordingInfo* r = manifest.find(stem)) return r;
  for (const auto& rec : manifest.recordings) {
    if (std::filesystem::path(rec.path).filename().string() == token) return &rec;
  }
  return nullptr;
}

}  // namespace annotation_detail

inline std::vector<Annotation> read_annotations(const std::string& path,
                                                const CorpusManifest& manifest,
                                                const SelectionTableOptions& opt = {}) {
  Table t = read_table(path, '\t');

  int col_begin = t.column("Begin Time (s)");
  int col_end = t.column("End Time (s)");
  int col_sel = t.column("Selection");
  int col_label = t.column(opt.label_column);
  if (col_sel < 0 || col_begin < 0 || col_end < 0)
    throw SchemaError("selection table missing required column "
                      "(Selection / Begin Time (s) / End Time (s)): " + path);
  if (col_label < 0)
    throw SchemaError("selection table missing label column '" + opt.label_column +
                      "': " + path);
  int col_file = t.column(opt.file_column);
  int col_lo = t.column("Low Freq (Hz)");
  int col_hi = t.column("High Freq (Hz)");

  std::vector<Annotation> out;
  out.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    std::string where = path + " row " + std::to_string(i + 1);
    if (row.size() < t.header.size())
      throw SchemaError("short row at " + where);

    Annotation a;
    a.interval.begin_s = parse_double(row[static_cast<std::size_t>(col_begin)], where);
    a.interval.end_s = parse_double(row[static_cast<std::size_t>(col_end)], where);
    if (!(a.interval.begin_s >= 0.0) || !(a.interval.end_s > a.interval.begin_s))
      throw FormatError("rejected row " + std::to_string(i + 1) +
                        ": end time must exceed begin time (" + where + ")");

    a.label = row[static_cast<std::size_t>(col_label)];
    if (!manifest.label_known(a.label))
      throw ReferenceError("label '" + a.label + "' not in manifest label set (" + where + ")");

    if (col_file >= 0) {
      const std::string& token = row[static_cast<std::size_t>(col_file)];
      const RecordingInfo* rec = annotation_detail::resolve_source(manifest, token);
      if (!rec)
        throw ReferenceError("unresolvable source '" + token + "' (" + where + ")");
      a.source_id = rec->source_id;
    } else {
      if (manifest.recordings.size() != 1)
        throw ReferenceError("selection table has no '" + opt.file_column +
                             "' column and manifest has " +
                             std::to_string(manifest.recordings.size()) +
                             " recordings: " + path);
      a.source_id = manifest.recordings.front().source_id;
    }

    if (col_lo >= 0 && !row[static_cast<std::size_t>(col_lo)].empty())
      a.low_freq_hz = parse_double(row[static_cast<std::size_t>(col_lo)], where);
    if (col_hi >= 0 && !row[static_cast<std::size_t>(col_hi)].empty())
      a.high_freq_hz = parse_double(row[static_cast<std::size_t>(col_hi)], where);

    out.push_back(std::move(a));
  }
  return out;
}

inline void write_annotations(const std::vector<Annotation>& annotations,
                              const std::string& path,
                              const SelectionTableOptions& opt = {}) {
  std::string out;
  out += "Selection\t" + opt.file_column + "\tBegin Time (s)\tEnd Time (s)\t"
         "Low Freq (Hz)\tHigh Freq (Hz)\t" + opt.label_column + "\n";
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const Annotation& a = annotations[i];
    out += std::to_string(i + 1) + "\t" + a.source_id + "\t" +
           format_double(a.interval.begin_s) + "\t" + format_double(a.interval.end_s) + "\t" +
           (a.low_freq_hz ? format_double(*a.low_freq_hz) : std::string()) + "\t" +
           (a.high_freq_hz ? format_double(*a.high_freq_hz) : std::string()) + "\t" +
           a.label + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace voxkit
