// voxkit/manifest.hpp
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
// Corpus manifest: which recordings exist, when they started, which recorder
// and species enclosure they belong to, the corpus label set, and optional
// pairing groups of recorders that ran simultaneously. Grammar documented in
// docs/formats.md; paths are relative to the manifest location.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

struct RecordingInfo {
  std::string source_id;
  std::string path;         // relative to manifest dir unless absolute
  double start_time_s = 0;  // absolute seconds (epoch-based)
  std::string recorder_id;
  std::string species;      // enclosure species, used by background sampling
};

struct CorpusManifest {
  std::vector<RecordingInfo> recordings;
  std::vector<std::string> label_set;                // ordered class names
  std::vector<std::vector<std::string>> pairing;     // disjoint groups
  std::string base_dir;                              // manifest directory

  const RecordingInfo* find(const std::string& source_id) const {
    for (const auto& r : recordings)
      if (r.source_id == source_id) return &r;
    return nullptr;
  }

  std::string resolve_path(const RecordingInfo& rec) const {
    std::filesystem::path p(rec.path);
    if (p.is_absolute() || base_dir.empty()) return p.string();
    return (std::filesystem::path(base_dir) / p).string();
  }

  // Recordings that were recorded simultaneously share a session group; an
  // unpaired recording is its own group. Group key is the lexicographically
  // smallest member id, which keeps grouping stable across reorderings.
  std::string session_group(const std::string& source_id) const {
    for (const auto& group : pairing) {
      if (std::find(group.begin(), group.end(), source_id) != group.end())
        return *std::min_element(group.begin(), group.end());
    }
    return source_id;
  }

  bool label_known(const std::string& label) const {
    if (label == kBackgroundLabel) return true;
    return std::find(label_set.begin(), label_set.end(), label) != label_set.end();
  }
};

namespace manifest_detail {

// Days since 1970-01-01 for a civil date (Gregorian, proleptic).
inline long long days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  long long era = (y >= 0 ? y : y - 399) / 400;
  unsigned yoe = static_cast<unsigned>(y - era * 400);
  unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
  unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

inline void civil_from_days(long long z, int& y, unsigned& m, unsigned& d) {
  z += 719468;
  long long era = (z >= 0 ? z : z - 146096) / 146097;
  unsigned doe = static_cast<unsigned>(z - era * 146097);
  unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  long long yy = static_cast<long long>(yoe) + era * 400;
  unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y = static_cast<int>(yy + (m <= 2));
}

}  // namespace manifest_detail

// Accepts either plain seconds ("3600", "12.5") or ISO 8601 local time
// "YYYY-MM-DDTHH:MM:SS[.fff]".
inline double parse_timestamp(const std::string& s, const std::string& context) {
  if (s.find('T') == std::string::npos && s.find('-') == std::string::npos) {
    return parse_double(s, context);
  }
  int y, mo, d, h, mi;
  double sec;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf", &y, &mo, &d, &h, &mi, &sec) != 6)
    throw FormatError("bad timestamp '" + s + "' in " + context);
  long long days = manifest_detail::days_from_civil(y, mo, d);
  return static_cast<double>(days) * 86400.0 + h * 3600.0 + mi * 60.0 + sec;
}

inline std::string format_timestamp(double t_s) {
  long long days = static_cast<long long>(std::floor(t_s / 86400.0));
  double rem = t_s - static_cast<double>(days) * 86400.0;
  int y;
  unsigned mo, d;
  manifest_detail::civil_from_days(days, y, mo, d);
  int h = static_cast<int>(rem / 3600.0);
  int mi = static_cast<int>((rem - h * 3600.0) / 60.0);
  double sec = rem - h * 3600.0 - mi * 60.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%06.3f", y, mo, d, h, mi, sec);
  return buf;
}

// Parses a manifest file: key=value lines followed by a "[recordings]" table.
inline CorpusManifest read_manifest(const std::string& path) {
  std::string text = read_text_file(path);
  CorpusManifest m;
  m.base_dir = std::filesystem::path(path).parent_path().string();

  std::vector<std::string> lines;
  {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      std::string line = (eol == std::string::npos) ? text.substr(pos)
                                                    : text.substr(pos, eol - pos);
      pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }

  auto trim = [](std::string s) {
    std::size_t a = s.find_first_not_of(" \t");
    std::size_t b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };

  std::size_t i = 0;
  bool in_table = false;
  std::vector<std::string> table_header;
  for (; i < lines.size(); ++i) {
    std::string line = lines[i];
    std::string lineno = path + ":" + std::to_string(i + 1);
    std::string trimmed = trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;

    if (trimmed == "[recordings]") {
      in_table = true;
      continue;
    }

    if (!in_table) {
      std::size_t eq = trimmed.find('=');
      if (eq == std::string::npos)
        throw SchemaError("expected key = value at " + lineno);
      std::string key = trim(trimmed.substr(0, eq));
      std::string value = trim(trimmed.substr(eq + 1));
      if (key == "label_set") {
        for (const auto& tok : split_line(value, ' '))
          if (!tok.empty()) m.label_set.push_back(tok);
      } else if (key == "pairing") {
        for (const auto& grp : split_line(value, '|')) {
          std::vector<std::string> ids;
          for (const auto& tok : split_line(trim(grp), ' '))
            if (!tok.empty()) ids.push_back(tok);
          if (ids.size() >= 2) m.pairing.push_back(ids);
        }
      } else {
        throw SchemaError("unknown manifest key '" + key + "' at " + lineno);
      }
      continue;
    }

    // Table section: first non-comment line is the header.
    std::vector<std::string> fields = split_line(line, '\t');
    if (table_header.empty()) {
      table_header = fields;
      for (const char* req : {"source_id", "path", "start_time", "recorder", "species"}) {
        if (std::find(table_header.begin(), table_header.end(), req) == table_header.end())
          throw SchemaError(std::string("recordings table missing column '") + req +
                            "' at " + lineno);
      }
      continue;
    }
    if (fields.size() < table_header.size())
      throw SchemaError("short recordings row at " + lineno);
    auto get = [&](const char* name) -> const std::string& {
      auto it = std::find(table_header.begin(), table_header.end(), name);
      return fields[static_cast<std::size_t>(it - table_header.begin())];
    };
    RecordingInfo rec;
    rec.source_id = get("source_id");
    rec.path = get("path");
    rec.start_time_s = parse_timestamp(get("start_time"), lineno);
    rec.recorder_id = get("recorder");
    rec.species = get("species");
    m.recordings.push_back(rec);
  }

  if (m.label_set.empty()) throw SchemaError("manifest has no label_set: " + path);
  if (m.recordings.empty()) throw SchemaError("manifest has no recordings: " + path);

  // source_ids unique
  std::set<std::string> seen;
  for (const auto& r : m.recordings) {
    if (!seen.insert(r.source_id).second)
      throw SchemaError("duplicate source_id '" + r.source_id + "' in " + path);
  }
  // pairing groups resolve and are disjoint
  std::set<std::string> paired;
  for (const auto& group : m.pairing) {
    for (const auto& id : group) {
      if (seen.count(id) == 0)
        throw ReferenceError("pairing references unknown source_id '" + id + "' in " + path);
      if (!paired.insert(id).second)
        throw SchemaError("source_id '" + id + "' appears in two pairing groups in " + path);
    }
  }
  return m;
}

inline void write_manifest(const CorpusManifest& m, const std::string& path) {
  std::string out;
  out += "# voxkit corpus manifest\n";
  out += "label_set =";
  for (const auto& l : m.label_set) out += " " + l;
  out += "\n";
  if (!m.pairing.empty()) {
    out += "pairing = ";
    for (std::size_t g = 0; g < m.pairing.size(); ++g) {
      if (g) out += " | ";
      for (std::size_t k = 0; k < m.pairing[g].size(); ++k) {
        if (k) out += " ";
        out += m.pairing[g][k];
      }
    }
    out += "\n";
  }
  out += "\n[recordings]\n";
  out += "source_id\tpath\tstart_time\trecorder\tspecies\n";
  for (const auto& r : m.recordings) {
    out += r.source_id + "\t" + r.path + "\t" + format_timestamp(r.start_time_s) + "\t" +
           r.recorder_id + "\t" + r.species + "\n";
  }
  write_file_atomic(path, out);
}

}  // namespace voxkit
