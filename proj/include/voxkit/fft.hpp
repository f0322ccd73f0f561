// voxkit/fft.hpp
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
// Iterative radix-2 FFT. Frame sizes in this library are powers of two by
// contract (FrameSpec enforces it), so nothing fancier is needed.

#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "voxkit/core.hpp"

namespace voxkit {

// In-place DIT radix-2. x.size() must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n))
    throw PreconditionError("fft: size must be a power of two, got " + std::to_string(n));

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = x[i + k];
        std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// |DFT|^2 of a real frame, bins 0 .. fft_size/2. Input shorter than fft_size
// is zero-padded.
inline std::vector<double> power_bins(const std::vector<double>& frame, std::size_t fft_size) {
  if (frame.size() > fft_size)
    throw PreconditionError("power_bins: frame longer than fft size");
  std::vector<std::complex<double>> x(fft_size, {0.0, 0.0});
  for (std::size_t i = 0; i < frame.size(); ++i) x[i] = {frame[i], 0.0};
  fft_inplace(x);
  std::vector<double> out(fft_size / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(x[k]);
  return out;
}

}  // namespace voxkit
