// voxkit/core.hpp
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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxkit {

// ---------------------------------------------------------------------------
// Error taxonomy. Every throwing operation in the library uses one of these,
// so callers (and the CLI) can distinguish bad input from bad state.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {   // malformed container / file contents
 public:
  using Error::Error;
};
class UnsupportedError : public Error {  // recognized but unsupported variant
 public:
  using Error::Error;
};
class IoError : public Error {       // OS-level read/write failure
 public:
  using Error::Error;
};
class SchemaError : public Error {   // table/config missing required fields
 public:
  using Error::Error;
};
class ReferenceError : public Error {  // dangling source_id or label
 public:
  using Error::Error;
};
class ConfigError : public Error {   // out-of-range or inconsistent parameters
 public:
  using Error::Error;
};
class BoundsError : public Error {   // interval outside its recording/index
 public:
  using Error::Error;
};
class NumericError : public Error {  // factorization / recursion degeneracy
 public:
  using Error::Error;
};
class ProtocolError : public Error {  // train/valid/test discipline violated
 public:
  using Error::Error;
};
class PreconditionError : public Error {  // caller violated a documented pre
 public:
  using Error::Error;
};
class ExhaustionError : public Error {  // sampler ran out of free audio
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Time and audio primitives.

struct TimeInterval {
  double begin_s = 0.0;
  double end_s = 0.0;

  double duration() const { return end_s - begin_s; }
  bool valid() const { return begin_s >= 0.0 && begin_s < end_s; }
  bool overlaps(const TimeInterval& o) const {
    return begin_s < o.end_s && o.begin_s < end_s;
  }
  double overlap(const TimeInterval& o) const {
    double lo = std::max(begin_s, o.begin_s);
    double hi = std::min(end_s, o.end_s);
    return hi > lo ? hi - lo : 0.0;
  }
  bool operator==(const TimeInterval&) const = default;
};

// Mono audio in [-1,1]. Immutable by convention once returned from a reader;
// nothing in the library mutates a clip it did not create.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;
  std::string source_id;
  double source_offset_s = 0.0;  // seconds from the start of the source file

  double duration_s() const {
    return sample_rate > 0
               ? static_cast<double>(samples.size()) / sample_rate
               : 0.0;
  }
};

// One labeled interval of one recording (a Raven-style selection row).
struct Annotation {
  std::string source_id;
  TimeInterval interval;
  std::string label;
  std::optional<double> low_freq_hz;
  std::optional<double> high_freq_hz;
};

// Chunk identity used to key features, splits and reports.
struct ChunkRef {
  std::string source_id;
  TimeInterval interval;

  bool operator==(const ChunkRef&) const = default;
};

// The non-species class produced by background sampling. Always a legal
// label, independent of the manifest label set.
inline const std::string kBackgroundLabel = "background";

// ---------------------------------------------------------------------------
// Small row-major matrix used by the DSP layer. The learn module converts to
// Eigen at its boundary; everything else just needs indexed storage.

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// ---------------------------------------------------------------------------
// Shared numeric helpers.

inline double db_from_power(double p, double floor_power = 1e-30) {
  return 10.0 * std::log10(std::max(p, floor_power));
}

inline bool is_power_of_two(std::size_t n) {
  return n != 0 && (n & (n - 1)) == 0;
}

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Sample index of a time instant, consistent everywhere a time is converted
// to a sample position (condensation, lifting, background sampling).
inline std::int64_t sample_index(double t_s, int sample_rate) {
  return std::llround(t_s * sample_rate);
}

}  // namespace voxkit
