// voxkit/mfcc.hpp
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
// Mel-frequency cepstral coefficients: triangular mel filterbank over the
// power spectrum, floored natural log, orthonormal DCT-II, coefficients
// 0..n_coeffs-1.

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/spectrogram.hpp"

namespace voxkit {

struct MfccConfig {
  std::size_t n_mels = 26;
  std::size_t n_coeffs = 25;  // MFCC 0..24
  double log_floor = 1e-10;
  double low_hz = 0.0;     // filterbank span; high_hz 0 = Nyquist
  double high_hz = 0.0;
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Unit-height triangles spaced evenly on the mel scale. Row f holds the
// weights of filter f over the fft bins.
inline Matrix mel_filterbank(std::size_t n_mels, std::size_t n_bins, double bin_hz,
                             double low_hz, double high_hz) {
  if (n_mels == 0) throw ConfigError("mel filterbank: n_mels must be positive");
  double mel_lo = hz_to_mel(low_hz);
  double mel_hi = hz_to_mel(high_hz);
  std::vector<double> edges_hz(n_mels + 2);
  for (std::size_t i = 0; i < edges_hz.size(); ++i) {
    double mel = mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                              static_cast<double>(n_mels + 1);
    edges_hz[i] = mel_to_hz(mel);
  }
  Matrix bank(n_mels, n_bins);
  for (std::size_t f = 0; f < n_mels; ++f) {
    double lo = edges_hz[f], mid = edges_hz[f + 1], hi = edges_hz[f + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      double hz = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (hz > lo && hz < hi) {
        w = (hz <= mid) ? (hz - lo) / (mid - lo) : (hi - hz) / (hi - mid);
      }
      bank.at(f, k) = w;
    }
  }
  return bank;
}

// Orthonormal DCT-II matrix (n_coeffs x n_inputs).
inline Matrix dct_matrix(std::size_t n_coeffs, std::size_t n_inputs) {
  Matrix d(n_coeffs, n_inputs);
  double scale0 = std::sqrt(1.0 / static_cast<double>(n_inputs));
  double scale = std::sqrt(2.0 / static_cast<double>(n_inputs));
  for (std::size_t k = 0; k < n_coeffs; ++k) {
    for (std::size_t m = 0; m < n_inputs; ++m) {
      double arg = std::numbers::pi * static_cast<double>(k) *
                   (static_cast<double>(m) + 0.5) / static_cast<double>(n_inputs);
      d.at(k, m) = (k == 0 ? scale0 : scale) * std::cos(arg);
    }
  }
  return d;
}

// frames x n_coeffs MFCC matrix.
inline Matrix mfcc(const PowerSpectrogram& pspec, const MfccConfig& cfg = {}) {
  if (cfg.n_coeffs > cfg.n_mels)
    throw ConfigError("mfcc: n_coeffs must not exceed n_mels");
  double high_hz = cfg.high_hz > 0.0 ? cfg.high_hz : pspec.sample_rate / 2.0;
  Matrix bank = mel_filterbank(cfg.n_mels, pspec.bins(), pspec.bin_hz, cfg.low_hz, high_hz);
  Matrix dct = dct_matrix(cfg.n_coeffs, cfg.n_mels);

  Matrix out(pspec.frames(), cfg.n_coeffs);
  std::vector<double> logmel(cfg.n_mels);
  for (std::size_t t = 0; t < pspec.frames(); ++t) {
    const double* p = pspec.power.row(t);
    for (std::size_t f = 0; f < cfg.n_mels; ++f) {
      double e = 0.0;
      const double* w = bank.row(f);
      for (std::size_t k = 0; k < pspec.bins(); ++k) e += w[k] * p[k];
      logmel[f] = std::log(std::max(e, cfg.log_floor));
    }
    for (std::size_t k = 0; k < cfg.n_coeffs; ++k) {
      double acc = 0.0;
      const double* d = dct.row(k);
      for (std::size_t f = 0; f < cfg.n_mels; ++f) acc += d[f] * logmel[f];
      out.at(t, k) = acc;
    }
  }
  return out;
}

}  // namespace voxkit
