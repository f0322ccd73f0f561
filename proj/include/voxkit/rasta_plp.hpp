// voxkit/rasta_plp.hpp
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
// RASTA-PLP cepstrum:
//   power spectrum -> Bark critical-band integration -> log -> RASTA
//   band-pass IIR along time per band -> exp -> equal-loudness weighting ->
//   cube-root compression -> autocorrelation via inverse DFT ->
//   Levinson-Durbin -> LPC-to-cepstrum (c0 = log model gain).
//
// The RASTA filter is 0.1*(2 + z^-1 - z^-3 - 2 z^-4) / (1 - pole*z^-1) with
// pole 0.94 by default (0.98, the value of the original publication, is a
// config choice). The first four output frames are zeroed while the FIR
// state warms up, matching the reference implementation.

#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/spectrogram.hpp"

namespace voxkit {

struct RastaPlpConfig {
  std::size_t lp_order = 12;   // yields 13 cepstral coefficients
  double rasta_pole = 0.94;
  bool rasta_enabled = true;
  double band_floor = 1e-10;   // floor before the log stage
};

inline double hz_to_bark(double hz) { return 6.0 * std::asinh(hz / 600.0); }
inline double bark_to_hz(double bark) { return 600.0 * std::sinh(bark / 6.0); }

inline std::size_t bark_band_count(double nyquist_hz) {
  return static_cast<std::size_t>(std::ceil(hz_to_bark(nyquist_hz))) + 1;
}

// Critical-band masking curve: flat top one Bark wide, 10^(2.5*x) skirt below
// (cut at -1.3 Bark), 10^(-x) skirt above (cut at +2.5 Bark).
inline double critical_band_weight(double bark_offset) {
  if (bark_offset < -1.3 || bark_offset > 2.5) return 0.0;
  if (bark_offset <= -0.5) return std::pow(10.0, 2.5 * (bark_offset + 0.5));
  if (bark_offset >= 0.5) return std::pow(10.0, -(bark_offset - 0.5));
  return 1.0;
}

// n_bands x n_bins integration matrix; band centers evenly spaced in Bark
// from 0 to the Nyquist Bark.
inline Matrix bark_filterbank(std::size_t n_bands, std::size_t n_bins, double bin_hz,
                              double nyquist_hz) {
  double nyq_bark = hz_to_bark(nyquist_hz);
  double step = n_bands > 1 ? nyq_bark / static_cast<double>(n_bands - 1) : nyq_bark;
  Matrix bank(n_bands, n_bins);
  for (std::size_t b = 0; b < n_bands; ++b) {
    double center = static_cast<double>(b) * step;
    for (std::size_t k = 0; k < n_bins; ++k) {
      double bark = hz_to_bark(static_cast<double>(k) * bin_hz);
      bank.at(b, k) = critical_band_weight(bark - center);
    }
  }
  return bank;
}

// 40-dB equal-loudness weight at frequency f (Hz-domain form of the PLP
// reference curve).
inline double equal_loudness(double hz) {
  double fsq = hz * hz;
  double t = fsq / (fsq + 1.6e5);
  return t * t * (fsq + 1.44e6) / (fsq + 9.61e6);
}

// RASTA transfer-function magnitude at a modulation frequency, given the
// frame rate. Used by tests to pin DC gain 0 and the 1-16 Hz pass band.
inline double rasta_filter_gain(double mod_freq_hz, double frame_rate_hz, double pole = 0.94) {
  const double b[5] = {0.2, 0.1, 0.0, -0.1, -0.2};
  double w = 2.0 * std::numbers::pi * mod_freq_hz / frame_rate_hz;
  double num_re = 0.0, num_im = 0.0;
  for (int k = 0; k < 5; ++k) {
    num_re += b[k] * std::cos(w * k);
    num_im -= b[k] * std::sin(w * k);
  }
  double den_re = 1.0 - pole * std::cos(w);
  double den_im = pole * std::sin(w);
  return std::sqrt((num_re * num_re + num_im * num_im) / (den_re * den_re + den_im * den_im));
}

// Filters one band trajectory. Direct form II transposed; the first four
// outputs are zeroed while state builds up with the FIR part only.
inline std::vector<double> rasta_filter(const std::vector<double>& x, double pole) {
  const double b[5] = {0.2, 0.1, 0.0, -0.1, -0.2};
  std::vector<double> y(x.size(), 0.0);
  double z1 = 0, z2 = 0, z3 = 0, z4 = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    bool warm = n < 4;
    double a1 = warm ? 0.0 : -pole;
    double v = b[0] * x[n] + z1;
    z1 = b[1] * x[n] - a1 * v + z2;  // a2..a4 are zero
    z2 = b[2] * x[n] + z3;
    z3 = b[3] * x[n] + z4;
    z4 = b[4] * x[n];
    y[n] = warm ? 0.0 : v;
  }
  return y;
}

struct LevinsonResult {
  std::vector<double> lpc;         // a[0] = 1, a[1..order]
  std::vector<double> reflection;  // k[1..order]
  double gain = 0.0;               // final prediction error
};

inline LevinsonResult levinson_durbin(const std::vector<double>& r, std::size_t order,
                                      const std::string& context = "") {
  if (r.size() < order + 1)
    throw PreconditionError("levinson_durbin: need order+1 autocorrelation lags");
  LevinsonResult res;
  res.lpc.assign(order + 1, 0.0);
  res.lpc[0] = 1.0;
  res.reflection.reserve(order);
  double err = r[0];
  if (!(err > 0.0))
    throw NumericError("levinson_durbin: non-positive zero-lag autocorrelation" +
                       (context.empty() ? "" : " at " + context));
  std::vector<double> prev(order + 1);
  for (std::size_t m = 1; m <= order; ++m) {
    double acc = r[m];
    for (std::size_t k = 1; k < m; ++k) acc += res.lpc[k] * r[m - k];
    double km = -acc / err;
    prev = res.lpc;
    for (std::size_t k = 1; k < m; ++k) res.lpc[k] = prev[k] + km * prev[m - k];
    res.lpc[m] = km;
    res.reflection.push_back(km);
    err *= (1.0 - km * km);
    if (!(err > 0.0))
      throw NumericError("levinson_durbin: prediction error became non-positive at order " +
                         std::to_string(m) + (context.empty() ? "" : " at " + context));
  }
  res.gain = err;
  return res;
}

// Cepstrum of the all-pole model: c0 = log gain, then the standard recursion.
inline std::vector<double> lpc_to_cepstrum(const LevinsonResult& lp) {
  std::size_t order = lp.lpc.size() - 1;
  std::vector<double> c(order + 1, 0.0);
  c[0] = std::log(lp.gain);
  for (std::size_t n = 1; n <= order; ++n) {
    double acc = 0.0;
    for (std::size_t k = 1; k < n; ++k)
      acc += static_cast<double>(n - k) * lp.lpc[k] * c[n - k];
    c[n] = -lp.lpc[n] - acc / static_cast<double>(n);
  }
  return c;
}

// frames x (lp_order + 1) cepstral matrix.
inline Matrix rasta_plp(const PowerSpectrogram& pspec, const RastaPlpConfig& cfg = {}) {
  const std::size_t n_frames = pspec.frames();
  if (cfg.rasta_enabled && n_frames < 5)
    throw PreconditionError("rasta_plp: need at least 5 frames, got " +
                            std::to_string(n_frames));

  double nyquist = pspec.sample_rate / 2.0;
  std::size_t n_bands = bark_band_count(nyquist);
  Matrix bank = bark_filterbank(n_bands, pspec.bins(), pspec.bin_hz, nyquist);

  // Critical-band integration, then log.
  Matrix aud(n_frames, n_bands);
  for (std::size_t t = 0; t < n_frames; ++t) {
    const double* p = pspec.power.row(t);
    for (std::size_t b = 0; b < n_bands; ++b) {
      double e = 0.0;
      const double* w = bank.row(b);
      for (std::size_t k = 0; k < pspec.bins(); ++k) e += w[k] * p[k];
      aud.at(t, b) = std::log(std::max(e, cfg.band_floor));
    }
  }

  // RASTA filtering along time per band, then back to the power domain.
  if (cfg.rasta_enabled) {
    std::vector<double> traj(n_frames);
    for (std::size_t b = 0; b < n_bands; ++b) {
      for (std::size_t t = 0; t < n_frames; ++t) traj[t] = aud.at(t, b);
      std::vector<double> filtered = rasta_filter(traj, cfg.rasta_pole);
      for (std::size_t t = 0; t < n_frames; ++t) aud.at(t, b) = filtered[t];
    }
  }

  // Equal loudness at band centers + cube-root compression; edge bands are
  // replaced by their neighbors afterwards, as in the reference pipeline.
  double nyq_bark = hz_to_bark(nyquist);
  double step = n_bands > 1 ? nyq_bark / static_cast<double>(n_bands - 1) : nyq_bark;
  std::vector<double> eql(n_bands);
  for (std::size_t b = 0; b < n_bands; ++b)
    eql[b] = equal_loudness(bark_to_hz(static_cast<double>(b) * step));

  Matrix out(n_frames, cfg.lp_order + 1);
  std::vector<double> spec(n_bands);
  const std::size_t ac_len = 2 * (n_bands - 1);
  std::vector<double> r(cfg.lp_order + 1);
  for (std::size_t t = 0; t < n_frames; ++t) {
    for (std::size_t b = 0; b < n_bands; ++b)
      spec[b] = std::cbrt(eql[b] * std::exp(aud.at(t, b)));
    spec[0] = spec[1];
    spec[n_bands - 1] = spec[n_bands - 2];

    // Autocorrelation = inverse DFT of the symmetric band spectrum.
    for (std::size_t k = 0; k <= cfg.lp_order; ++k) {
      double acc = spec[0] + spec[n_bands - 1] * std::cos(std::numbers::pi *
                                                          static_cast<double>(k));
      for (std::size_t j = 1; j + 1 < n_bands; ++j)
        acc += 2.0 * spec[j] *
               std::cos(2.0 * std::numbers::pi * static_cast<double>(j * k) /
                        static_cast<double>(ac_len));
      r[k] = acc / static_cast<double>(ac_len);
    }

    LevinsonResult lp = levinson_durbin(r, cfg.lp_order, "frame " + std::to_string(t));
    std::vector<double> cep = lpc_to_cepstrum(lp);
    for (std::size_t k = 0; k <= cfg.lp_order; ++k) out.at(t, k) = cep[k];
  }
  return out;
}

}  // namespace voxkit
