// voxkit/spectrogram.hpp
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

#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/fft.hpp"
#include "voxkit/framing.hpp"

namespace voxkit {

// frames x (fft_size/2 + 1) nonnegative |DFT|^2 values.
struct PowerSpectrogram {
  Matrix power;
  double bin_hz = 0.0;
  int sample_rate = 0;
  std::size_t fft_size = 0;
  double hop_s = 0.0;
  double frame_len_s = 0.0;

  std::size_t frames() const { return power.rows; }
  std::size_t bins() const { return power.cols; }
};

inline PowerSpectrogram power_spectrum(const std::vector<std::vector<double>>& frames,
                                       const FrameSpec& spec, int sample_rate) {
  std::size_t fft_size = spec.effective_fft_size(sample_rate);
  PowerSpectrogram ps;
  ps.sample_rate = sample_rate;
  ps.fft_size = fft_size;
  ps.bin_hz = static_cast<double>(sample_rate) / static_cast<double>(fft_size);
  ps.hop_s = spec.hop_s;
  ps.frame_len_s = spec.frame_len_s;
  ps.power = Matrix(frames.size(), fft_size / 2 + 1);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    std::vector<double> bins = power_bins(frames[t], fft_size);
    std::copy(bins.begin(), bins.end(), ps.power.row(t));
  }
  return ps;
}

inline PowerSpectrogram power_spectrum(const AudioClip& clip, const FrameSpec& spec) {
  return power_spectrum(frame_signal(clip, spec), spec, clip.sample_rate);
}

}  // namespace voxkit
