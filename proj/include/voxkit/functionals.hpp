// voxkit/functionals.hpp
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
// Ten statistical functionals per LLD contour, giving 114*10 = 1140
// suprasegmental features per chunk regardless of frame count.
//
// Per LLD column, in order: mean; population standard deviation; slope and
// offset of the first-order least-squares fit over normalized time t in
// [0,1]; curvature (leading coefficient of the second-order fit); min value;
// relative position of the min; max value; relative position of the max;
// zero-crossing rate of the contour after affine normalization into [-1,1]
// (sign changes per transition). Ties break to the first occurrence.
// Single-frame contours take the degenerate values documented below.

#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/lld.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

inline constexpr std::size_t kFunctionalCount = 10;
inline constexpr std::size_t kFeatureDims = kLldDims * kFunctionalCount;  // 1140

inline const std::array<const char*, kFunctionalCount> kFunctionalNames = {
    "mean", "stddev", "slope", "offset", "curvature",
    "min", "minpos", "max", "maxpos", "zcr"};

struct FeatureVector {
  std::vector<double> values;  // 1140, blocks of 10 per LLD
  std::string label;           // empty when unlabeled
  ChunkRef chunk_ref;
};

namespace functionals_detail {

// The ten functionals of one contour, written to out[0..9].
inline void contour_functionals(const double* x, std::size_t n, double* out) {
  double mean = 0.0;
  for (std::size_t t = 0; t < n; ++t) mean += x[t];
  mean /= static_cast<double>(n);

  double var = 0.0;
  for (std::size_t t = 0; t < n; ++t) var += (x[t] - mean) * (x[t] - mean);
  var /= static_cast<double>(n);  // population divisor

  std::size_t imin = 0, imax = 0;
  for (std::size_t t = 1; t < n; ++t) {
    if (x[t] < x[imin]) imin = t;
    if (x[t] > x[imax]) imax = t;
  }

  double slope = 0.0, offset = mean, curvature = 0.0;
  double relmin = 0.0, relmax = 0.0, zcr = 0.0;
  if (n >= 2) {
    // First-order LS over t_i = i/(n-1). With tbar the mean time:
    // slope = cov(t,x)/var(t), offset = mean - slope*tbar.
    double tbar = 0.5;
    double stt = 0.0, stx = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      double ti = static_cast<double>(t) / static_cast<double>(n - 1) - tbar;
      stt += ti * ti;
      stx += ti * (x[t] - mean);
    }
    slope = stx / stt;
    offset = mean - slope * tbar;

    // Second-order fit: solve the 3x3 normal equations for [c0 c1 c2],
    // curvature = c2. Degenerates to 0 when n == 2 (system is singular).
    if (n >= 3) {
      double s0 = static_cast<double>(n), s1 = 0, s2 = 0, s3 = 0, s4 = 0;
      double b0 = 0, b1 = 0, b2 = 0;
      for (std::size_t t = 0; t < n; ++t) {
        double ti = static_cast<double>(t) / static_cast<double>(n - 1);
        double ti2 = ti * ti;
        s1 += ti;
        s2 += ti2;
        s3 += ti2 * ti;
        s4 += ti2 * ti2;
        b0 += x[t];
        b1 += ti * x[t];
        b2 += ti2 * x[t];
      }
      // Cramer on the symmetric 3x3 [s0 s1 s2; s1 s2 s3; s2 s3 s4];
      // curvature is the third unknown.
      double det = s0 * (s2 * s4 - s3 * s3) - s1 * (s1 * s4 - s3 * s2) +
                   s2 * (s1 * s3 - s2 * s2);
      if (std::abs(det) > 1e-14) {
        double det2 = s0 * (s2 * b2 - b1 * s3) - s1 * (s1 * b2 - b1 * s2) +
                      b0 * (s1 * s3 - s2 * s2);
        curvature = det2 / det;
      }
    }

    relmin = static_cast<double>(imin) / static_cast<double>(n - 1);
    relmax = static_cast<double>(imax) / static_cast<double>(n - 1);

    // Normalize values into [-1,1]; a constant contour maps to all zeros.
    double lo = x[imin], hi = x[imax];
    double span = hi - lo;
    if (span > 0.0) {
      int prev_sign = 0;
      std::size_t transitions = 0;
      for (std::size_t t = 0; t < n; ++t) {
        double z = 2.0 * (x[t] - lo) / span - 1.0;
        int s = z > 0.0 ? 1 : (z < 0.0 ? -1 : 0);
        if (s == 0) continue;  // zero takes its successor's sign
        if (prev_sign != 0 && s != prev_sign) ++transitions;
        prev_sign = s;
      }
      zcr = static_cast<double>(transitions) / static_cast<double>(n - 1);
    }
  }

  out[0] = mean;
  out[1] = std::sqrt(var);
  out[2] = slope;
  out[3] = offset;
  out[4] = curvature;
  out[5] = x[imin];
  out[6] = relmin;
  out[7] = x[imax];
  out[8] = relmax;
  out[9] = zcr;
}

}  // namespace functionals_detail

inline FeatureVector summarize(const LldMatrix& lld) {
  if (lld.frames() == 0)
    throw PreconditionError("summarize: contour has no frames");
  FeatureVector fv;
  fv.values.resize(lld.dims() * kFunctionalCount);
  std::vector<double> contour(lld.frames());
  for (std::size_t c = 0; c < lld.dims(); ++c) {
    for (std::size_t t = 0; t < lld.frames(); ++t) contour[t] = lld.values.at(t, c);
    functionals_detail::contour_functionals(contour.data(), contour.size(),
                                            fv.values.data() + c * kFunctionalCount);
  }
  for (double v : fv.values)
    if (!std::isfinite(v)) throw NumericError("summarize: non-finite functional value");
  return fv;
}

// ---------------------------------------------------------------------------
// Feature CSV: lld{i}_{functional} columns, then label, source_id, begin_s,
// end_s. Values are round-trippable decimals.

inline std::vector<std::string> feature_column_names(std::size_t dims = kLldDims) {
  std::vector<std::string> names;
  names.reserve(dims * kFunctionalCount);
  for (std::size_t i = 0; i < dims; ++i)
    for (std::size_t f = 0; f < kFunctionalCount; ++f)
      names.push_back("lld" + std::to_string(i) + "_" + kFunctionalNames[f]);
  return names;
}

inline void write_features_csv(const std::vector<FeatureVector>& features,
                               const std::string& path) {
  std::string out = join_fields(feature_column_names(), ',');
  out += ",label,source_id,begin_s,end_s\n";
  for (const FeatureVector& fv : features) {
    if (fv.values.size() != kFeatureDims)
      throw PreconditionError("write_features_csv: vector is not 1140-dimensional");
    for (std::size_t i = 0; i < fv.values.size(); ++i) {
      if (i) out += ',';
      out += format_double(fv.values[i]);
    }
    out += ',' + fv.label + ',' + fv.chunk_ref.source_id + ',' +
           format_double(fv.chunk_ref.interval.begin_s) + ',' +
           format_double(fv.chunk_ref.interval.end_s) + '\n';
  }
  write_file_atomic(path, out);
}

inline std::vector<FeatureVector> read_features_csv(const std::string& path) {
  Table t = read_table(path, ',');
  std::vector<std::string> expected = feature_column_names();
  if (t.header.size() != expected.size() + 4)
    throw SchemaError("feature CSV has " + std::to_string(t.header.size()) +
                      " columns, expected " + std::to_string(expected.size() + 4) +
                      ": " + path);
  for (std::size_t i = 0; i < expected.size(); ++i)
    if (t.header[i] != expected[i])
      throw SchemaError("feature CSV column " + std::to_string(i) + " is '" +
                        t.header[i] + "', expected '" + expected[i] + "': " + path);

  std::vector<FeatureVector> out;
  out.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::string where = path + " row " + std::to_string(r + 1);
    if (row.size() != t.header.size()) throw SchemaError("short row at " + where);
    FeatureVector fv;
    fv.values.resize(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i)
      fv.values[i] = parse_double(row[i], where);
    fv.label = row[expected.size()];
    fv.chunk_ref.source_id = row[expected.size() + 1];
    fv.chunk_ref.interval.begin_s = parse_double(row[expected.size() + 2], where);
    fv.chunk_ref.interval.end_s = parse_double(row[expected.size() + 3], where);
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace voxkit
