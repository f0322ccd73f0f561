// voxkit/tsv.hpp
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
// Delimited-table plumbing shared by the selection-table, index, feature and
// report formats, plus atomic file writes (temp file + rename) so that no
// subcommand ever leaves a partial artifact behind.

#pragma once

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "voxkit/core.hpp"

namespace voxkit {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by exact header name; -1 when absent.
  int column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    return -1;
  }
};

inline std::vector<std::string> split_line(std::string_view line, char delim) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      break;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses a delimited table with a mandatory header row. Blank trailing lines
// are ignored; embedded blank lines are not allowed.
inline Table read_table(const std::string& path, char delim = '\t') {
  std::string text = read_text_file(path);
  Table t;
  std::size_t pos = 0;
  bool first = true;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line;
    if (eol == std::string::npos) {
      line = std::string_view(text).substr(pos);
      pos = text.size() + 1;
    } else {
      line = std::string_view(text).substr(pos, eol - pos);
      pos = eol + 1;
    }
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (first) {
      t.header = split_line(line, delim);
      first = false;
    } else {
      t.rows.push_back(split_line(line, delim));
    }
  }
  if (first) throw SchemaError("empty table (no header row): " + path);
  return t;
}

// Strict double parse, "." decimal separator regardless of locale.
inline double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last)
    throw FormatError("not a number: '" + std::string(s) + "' in " + context);
  return v;
}

inline long long parse_int(std::string_view s, const std::string& context) {
  long long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw FormatError("not an integer: '" + std::string(s) + "' in " + context);
  return v;
}

// Shortest round-trippable decimal formatting; all persisted floats go
// through this so artifacts are byte-stable and re-parse bit-exactly.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, p);
}

inline std::string format_double(double v, int precision) {
  char buf[64];
  int n = std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
  return std::string(buf, static_cast<std::size_t>(n));
}

// Writes content to path via a temp file in the same directory + rename.
inline void write_file_atomic(const std::string& path, std::string_view content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  fs::path tmp = dir / (target.filename().string() + ".tmp." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for write: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("rename failed for " + path);
  }
}

inline std::string join_fields(const std::vector<std::string>& fields, char delim) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += delim;
    line += fields[i];
  }
  return line;
}

}  // namespace voxkit
