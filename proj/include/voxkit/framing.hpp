// voxkit/framing.hpp
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
#include <numbers>
#include <string>
#include <vector>

#include "voxkit/core.hpp"

namespace voxkit {

enum class WindowKind { kHamming, kHann };

// Framing parameters. Defaults are 25 ms / 10 ms Hamming with 0.97
// pre-emphasis; fft_size 0 means "next power of two >= frame length", which
// at 48 kHz resolves to 2048.
struct FrameSpec {
  double frame_len_s = 0.025;
  double hop_s = 0.010;
  WindowKind window = WindowKind::kHamming;
  std::size_t fft_size = 0;
  double preemphasis = 0.97;

  std::size_t frame_samples(int sample_rate) const {
    return static_cast<std::size_t>(std::lround(frame_len_s * sample_rate));
  }
  std::size_t hop_samples(int sample_rate) const {
    return static_cast<std::size_t>(std::lround(hop_s * sample_rate));
  }
  std::size_t effective_fft_size(int sample_rate) const {
    std::size_t n = fft_size ? fft_size : next_power_of_two(frame_samples(sample_rate));
    return n;
  }

  void validate(int sample_rate) const {
    if (!(hop_s > 0.0) || frame_len_s < hop_s)
      throw ConfigError("frame spec: need frame_len_s >= hop_s > 0");
    if (!(preemphasis >= 0.0 && preemphasis < 1.0))
      throw ConfigError("frame spec: preemphasis must be in [0,1)");
    if (frame_samples(sample_rate) == 0 || hop_samples(sample_rate) == 0)
      throw ConfigError("frame spec: frame/hop shorter than one sample");
    std::size_t n = effective_fft_size(sample_rate);
    if (!is_power_of_two(n))
      throw ConfigError("frame spec: fft_size must be a power of two, got " +
                        std::to_string(n));
    if (n < frame_samples(sample_rate))
      throw ConfigError("frame spec: fft_size smaller than frame length");
  }
};

inline std::vector<double> make_window(WindowKind kind, std::size_t len) {
  std::vector<double> w(len, 1.0);
  if (len <= 1) return w;
  for (std::size_t n = 0; n < len; ++n) {
    double phase = 2.0 * std::numbers::pi * static_cast<double>(n) /
                   static_cast<double>(len - 1);
    w[n] = (kind == WindowKind::kHamming) ? 0.54 - 0.46 * std::cos(phase)
                                          : 0.5 - 0.5 * std::cos(phase);
  }
  return w;
}

// Pre-emphasized, windowed frames. Frame count is 1 + floor((N - L) / H);
// pre-emphasis y[n] = x[n] - a*x[n-1] runs over the whole clip before
// windowing (first sample keeps its value).
inline std::vector<std::vector<double>> frame_signal(const AudioClip& clip,
                                                     const FrameSpec& spec) {
  spec.validate(clip.sample_rate);
  const std::size_t L = spec.frame_samples(clip.sample_rate);
  const std::size_t H = spec.hop_samples(clip.sample_rate);
  const std::size_t N = clip.samples.size();
  if (N < L)
    throw PreconditionError("frame_signal: clip of " + std::to_string(N) +
                            " samples is shorter than one frame (" +
                            std::to_string(L) + ")");

  std::vector<double> pre(N);
  pre[0] = clip.samples[0];
  for (std::size_t n = 1; n < N; ++n)
    pre[n] = clip.samples[n] - spec.preemphasis * clip.samples[n - 1];

  std::vector<double> win = make_window(spec.window, L);
  std::size_t n_frames = 1 + (N - L) / H;
  std::vector<std::vector<double>> frames(n_frames);
  for (std::size_t t = 0; t < n_frames; ++t) {
    frames[t].resize(L);
    const double* src = pre.data() + t * H;
    for (std::size_t n = 0; n < L; ++n) frames[t][n] = src[n] * win[n];
  }
  return frames;
}

}  // namespace voxkit
