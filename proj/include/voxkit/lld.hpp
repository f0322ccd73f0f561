// voxkit/lld.hpp
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
// The 114-dimensional low-level descriptor contour: MFCC 0-24 and RASTA-PLP
// cepstrum c0-c12 (38 static LLDs), each with regression deltas and
// delta-deltas. Column layout: [MFCC | PLP | delta(38) | deltadelta(38)].

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/mfcc.hpp"
#include "voxkit/rasta_plp.hpp"
#include "voxkit/spectrogram.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

inline constexpr std::size_t kMfccCount = 25;
inline constexpr std::size_t kPlpCount = 13;
inline constexpr std::size_t kStaticLldCount = kMfccCount + kPlpCount;  // 38
inline constexpr std::size_t kLldDims = kStaticLldCount * 3;            // 114

struct LldMatrix {
  Matrix values;  // frames x 114

  std::size_t frames() const { return values.rows; }
  std::size_t dims() const { return values.cols; }
};

struct LldConfig {
  MfccConfig mfcc;
  RastaPlpConfig plp;
  std::size_t delta_window = 2;
};

// Regression delta with replicated-edge padding:
//   d_t = sum_w w*(x_{t+w} - x_{t-w}) / (2*sum_w w^2)
inline Matrix deltas(const Matrix& x, std::size_t window) {
  if (window == 0) throw ConfigError("deltas: window must be positive");
  double denom = 0.0;
  for (std::size_t w = 1; w <= window; ++w)
    denom += static_cast<double>(w) * static_cast<double>(w);
  denom *= 2.0;

  auto clamp_row = [&](std::ptrdiff_t t) -> std::size_t {
    if (t < 0) return 0;
    if (t >= static_cast<std::ptrdiff_t>(x.rows)) return x.rows - 1;
    return static_cast<std::size_t>(t);
  };

  Matrix out(x.rows, x.cols);
  for (std::size_t t = 0; t < x.rows; ++t) {
    for (std::size_t c = 0; c < x.cols; ++c) {
      double acc = 0.0;
      for (std::size_t w = 1; w <= window; ++w) {
        std::size_t hi = clamp_row(static_cast<std::ptrdiff_t>(t) + static_cast<std::ptrdiff_t>(w));
        std::size_t lo = clamp_row(static_cast<std::ptrdiff_t>(t) - static_cast<std::ptrdiff_t>(w));
        acc += static_cast<double>(w) * (x.at(hi, c) - x.at(lo, c));
      }
      out.at(t, c) = acc / denom;
    }
  }
  return out;
}

inline LldMatrix extract_lld(const AudioClip& clip, const FrameSpec& spec,
                             const LldConfig& cfg = {}) {
  PowerSpectrogram ps = power_spectrum(clip, spec);
  Matrix mf = mfcc(ps, cfg.mfcc);
  Matrix plp = rasta_plp(ps, cfg.plp);
  if (mf.cols != kMfccCount || plp.cols != kPlpCount)
    throw ConfigError("extract_lld: configured widths break the 25+13 static layout");

  Matrix statics(ps.frames(), kStaticLldCount);
  for (std::size_t t = 0; t < ps.frames(); ++t) {
    for (std::size_t c = 0; c < kMfccCount; ++c) statics.at(t, c) = mf.at(t, c);
    for (std::size_t c = 0; c < kPlpCount; ++c)
      statics.at(t, kMfccCount + c) = plp.at(t, c);
  }
  Matrix d1 = deltas(statics, cfg.delta_window);
  Matrix d2 = deltas(d1, cfg.delta_window);

  LldMatrix lld;
  lld.values = Matrix(ps.frames(), kLldDims);
  for (std::size_t t = 0; t < ps.frames(); ++t) {
    for (std::size_t c = 0; c < kStaticLldCount; ++c) {
      lld.values.at(t, c) = statics.at(t, c);
      lld.values.at(t, kStaticLldCount + c) = d1.at(t, c);
      lld.values.at(t, 2 * kStaticLldCount + c) = d2.at(t, c);
    }
  }
  for (double v : lld.values.data) {
    if (!std::isfinite(v)) throw NumericError("extract_lld: non-finite descriptor value");
  }
  return lld;
}

// Canonical LLD column names: mfcc0..mfcc24, plpcep0..plpcep12, then the same
// with d_ and dd_ prefixes.
inline std::vector<std::string> lld_column_names() {
  std::vector<std::string> names;
  names.reserve(kLldDims);
  auto statics = [] {
    std::vector<std::string> s;
    for (std::size_t i = 0; i < kMfccCount; ++i) s.push_back("mfcc" + std::to_string(i));
    for (std::size_t i = 0; i < kPlpCount; ++i) s.push_back("plpcep" + std::to_string(i));
    return s;
  }();
  for (const auto& n : statics) names.push_back(n);
  for (const auto& n : statics) names.push_back("d_" + n);
  for (const auto& n : statics) names.push_back("dd_" + n);
  return names;
}

// frames x 114 CSV with the canonical header, for cross-checks against
// external tools.
inline void write_lld_csv(const LldMatrix& lld, const std::string& path) {
  std::vector<std::string> names = lld_column_names();
  std::string out = join_fields(names, ',') + "\n";
  for (std::size_t t = 0; t < lld.frames(); ++t) {
    for (std::size_t c = 0; c < lld.dims(); ++c) {
      if (c) out += ',';
      out += format_double(lld.values.at(t, c));
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

}  // namespace voxkit
