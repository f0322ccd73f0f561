// voxkit/detect.hpp
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
// Energy/change vocalisation detection inside a species-specific frequency
// sub-band. A frame is active when its in-band loudness exceeds a dB
// threshold OR when the cumulative in-band spectral distribution of a local
// window deviates (sup-norm) from the corpus-wide distribution by more than
// a [0,1] threshold. Active frames are padded, merged across small gaps, and
// filtered by a minimum event duration.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/spectrogram.hpp"

namespace voxkit {

struct DetectorConfig {
  double band_low_hz = 0.0;
  double band_high_hz = 2000.0;  // species band; 0-2 kHz default
  double loudness_db_threshold = -30.0;
  double deviation_threshold = 0.2;  // sup-norm distance in [0,1]
  double local_window_s = 1.0;
  double min_event_s = 0.1;
  double merge_gap_s = 0.5;
  double pad_s = 0.2;

  void validate(double nyquist_hz) const {
    if (!(band_low_hz >= 0.0) || !(band_low_hz < band_high_hz) ||
        band_high_hz > nyquist_hz + 1e-9)
      throw ConfigError("detector: need 0 <= band_low_hz < band_high_hz <= Nyquist");
    if (!(local_window_s > 0.0)) throw ConfigError("detector: local_window_s must be positive");
    if (!std::isfinite(loudness_db_threshold))
      throw ConfigError("detector: loudness threshold must be finite");
    if (!(deviation_threshold >= 0.0 && deviation_threshold <= 1.0))
      throw ConfigError("detector: deviation_threshold must lie in [0,1]");
    if (min_event_s < 0.0 || merge_gap_s < 0.0 || pad_s < 0.0)
      throw ConfigError("detector: durations must be nonnegative");
  }
};

struct GlobalSpectralProfile {
  std::vector<double> mean_power;  // per-bin mean power over all frames
  std::vector<double> band_cdf;    // cumulative distribution over in-band bins
  std::size_t band_begin = 0;      // [band_begin, band_end) bin range
  std::size_t band_end = 0;
  double bin_hz = 0.0;
  int sample_rate = 0;
};

inline constexpr double kEnvelopeEpsilon = 1e-12;

namespace detect_detail {

// Bins whose center frequency lies inside [low, high].
inline std::pair<std::size_t, std::size_t> band_bins(double bin_hz, std::size_t n_bins,
                                                     double low_hz, double high_hz) {
  std::size_t lo = static_cast<std::size_t>(std::ceil(low_hz / bin_hz - 1e-9));
  std::size_t hi = static_cast<std::size_t>(std::floor(high_hz / bin_hz + 1e-9)) + 1;
  if (hi > n_bins) hi = n_bins;
  if (lo >= hi)
    throw ConfigError("detector band [" + std::to_string(low_hz) + ", " +
                      std::to_string(high_hz) + "] Hz contains no spectrogram bins");
  return {lo, hi};
}

inline std::vector<double> cdf_from_sums(const std::vector<double>& sums) {
  std::vector<double> cdf(sums.size(), 0.0);
  double total = 0.0;
  for (double v : sums) total += v;
  if (total <= 0.0) return cdf;  // all-zero stays all-zero; caller handles
  double acc = 0.0;
  for (std::size_t i = 0; i < sums.size(); ++i) {
    acc += sums[i];
    cdf[i] = acc / total;
  }
  cdf.back() = 1.0;
  return cdf;
}

}  // namespace detect_detail

// Per-frame in-band loudness: 10*log10(sum of in-band power + eps).
inline std::vector<double> band_power_envelope(const PowerSpectrogram& pspec,
                                               const DetectorConfig& config) {
  config.validate(pspec.sample_rate / 2.0);
  auto [lo, hi] = detect_detail::band_bins(pspec.bin_hz, pspec.bins(),
                                           config.band_low_hz, config.band_high_hz);
  std::vector<double> env(pspec.frames());
  for (std::size_t t = 0; t < pspec.frames(); ++t) {
    const double* p = pspec.power.row(t);
    double sum = 0.0;
    for (std::size_t k = lo; k < hi; ++k) sum += p[k];
    env[t] = 10.0 * std::log10(sum + kEnvelopeEpsilon);
  }
  return env;
}

// Corpus-wide spectral profile: per-bin mean power over every frame of every
// recording, plus the normalized cumulative distribution over the species
// band. Scale-invariant by construction.
inline GlobalSpectralProfile build_global_profile(const std::vector<const AudioClip*>& recordings,
                                                  const DetectorConfig& config,
                                                  const FrameSpec& spec) {
  if (recordings.empty())
    throw PreconditionError("build_global_profile: no recordings");
  int rate = recordings.front()->sample_rate;
  for (const AudioClip* c : recordings)
    if (c->sample_rate != rate)
      throw PreconditionError("build_global_profile: mixed sample rates (" +
                              std::to_string(rate) + " vs " +
                              std::to_string(c->sample_rate) + ")");
  config.validate(rate / 2.0);

  GlobalSpectralProfile profile;
  profile.sample_rate = rate;
  std::size_t total_frames = 0;
  for (const AudioClip* clip : recordings) {
    PowerSpectrogram ps = power_spectrum(*clip, spec);
    if (profile.mean_power.empty()) {
      profile.mean_power.assign(ps.bins(), 0.0);
      profile.bin_hz = ps.bin_hz;
      auto [lo, hi] = detect_detail::band_bins(ps.bin_hz, ps.bins(),
                                               config.band_low_hz, config.band_high_hz);
      profile.band_begin = lo;
      profile.band_end = hi;
    }
    for (std::size_t t = 0; t < ps.frames(); ++t) {
      const double* p = ps.power.row(t);
      for (std::size_t k = 0; k < ps.bins(); ++k) profile.mean_power[k] += p[k];
    }
    total_frames += ps.frames();
  }
  if (total_frames == 0)
    throw PreconditionError("build_global_profile: recordings shorter than one frame");
  for (double& v : profile.mean_power) v /= static_cast<double>(total_frames);

  std::vector<double> band(profile.mean_power.begin() + static_cast<std::ptrdiff_t>(profile.band_begin),
                           profile.mean_power.begin() + static_cast<std::ptrdiff_t>(profile.band_end));
  profile.band_cdf = detect_detail::cdf_from_sums(band);
  return profile;
}

// Per-frame sup-norm distance between the local-window in-band cumulative
// distribution and the global one. A window with no in-band power reads as
// distance 0 (no evidence of change).
inline std::vector<double> deviation_trace(const PowerSpectrogram& pspec,
                                           const GlobalSpectralProfile& profile,
                                           const DetectorConfig& config) {
  config.validate(pspec.sample_rate / 2.0);
  if (profile.band_cdf.empty())
    throw PreconditionError("deviation_trace: profile has no band distribution");
  const std::size_t lo = profile.band_begin, hi = profile.band_end;
  if (hi > pspec.bins())
    throw PreconditionError("deviation_trace: profile band exceeds spectrogram bins");
  const std::size_t n_band = hi - lo;
  const std::size_t n = pspec.frames();

  // Prefix sums per in-band bin over frames: sums[t+1][k].
  std::vector<double> prefix((n + 1) * n_band, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    const double* p = pspec.power.row(t);
    const double* prev = prefix.data() + t * n_band;
    double* cur = prefix.data() + (t + 1) * n_band;
    for (std::size_t k = 0; k < n_band; ++k) cur[k] = prev[k] + p[lo + k];
  }

  std::size_t win = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(config.local_window_s / pspec.hop_s)));
  std::vector<double> out(n, 0.0);
  std::vector<double> sums(n_band);
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t w_lo = t >= win / 2 ? t - win / 2 : 0;
    std::size_t w_hi = std::min(n, w_lo + win);
    if (w_hi - w_lo < win && w_hi == n)
      w_lo = w_hi >= win ? w_hi - win : 0;
    const double* a = prefix.data() + w_lo * n_band;
    const double* b = prefix.data() + w_hi * n_band;
    double total = 0.0;
    for (std::size_t k = 0; k < n_band; ++k) {
      sums[k] = b[k] - a[k];
      total += sums[k];
    }
    if (total <= n_band * kEnvelopeEpsilon) continue;
    double acc = 0.0, dist = 0.0;
    for (std::size_t k = 0; k < n_band; ++k) {
      acc += sums[k];
      double d = std::abs(acc / total - profile.band_cdf[k]);
      if (d > dist) dist = d;
    }
    out[t] = dist;
  }
  return out;
}

// Threshold + morphology stage, shared verbatim by detect_events and the
// grid search so that reported numbers are exactly reproducible.
inline std::vector<TimeInterval> events_from_traces(const std::vector<double>& envelope_db,
                                                    const std::vector<double>& deviation,
                                                    const DetectorConfig& config,
                                                    double hop_s, double frame_len_s,
                                                    double clip_duration_s) {
  if (envelope_db.size() != deviation.size())
    throw PreconditionError("events_from_traces: trace length mismatch");
  const std::size_t n = envelope_db.size();

  std::vector<TimeInterval> raw;
  bool active = false;
  std::size_t run_start = 0;
  for (std::size_t t = 0; t <= n; ++t) {
    bool on = t < n && (envelope_db[t] > config.loudness_db_threshold ||
                        deviation[t] > config.deviation_threshold);
    if (on && !active) {
      active = true;
      run_start = t;
    } else if (!on && active) {
      active = false;
      double begin = static_cast<double>(run_start) * hop_s - config.pad_s;
      double end = static_cast<double>(t - 1) * hop_s + frame_len_s + config.pad_s;
      raw.push_back({std::max(0.0, begin), std::min(clip_duration_s, end)});
    }
  }

  // Merge gaps smaller than merge_gap_s, then drop short events.
  std::vector<TimeInterval> merged;
  for (const TimeInterval& ev : raw) {
    if (!merged.empty() && ev.begin_s - merged.back().end_s < config.merge_gap_s)
      merged.back().end_s = std::max(merged.back().end_s, ev.end_s);
    else
      merged.push_back(ev);
  }
  std::vector<TimeInterval> out;
  for (const TimeInterval& ev : merged)
    if (ev.duration() >= config.min_event_s) out.push_back(ev);
  return out;
}

inline std::vector<TimeInterval> detect_events(const AudioClip& clip,
                                               const GlobalSpectralProfile& profile,
                                               const DetectorConfig& config,
                                               const FrameSpec& spec) {
  PowerSpectrogram ps = power_spectrum(clip, spec);
  std::size_t win = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(config.local_window_s / ps.hop_s)));
  if (ps.frames() < win)
    throw PreconditionError("detect_events: clip shorter than one local window");
  std::vector<double> env = band_power_envelope(ps, config);
  std::vector<double> dev = deviation_trace(ps, profile, config);
  return events_from_traces(env, dev, config, ps.hop_s, ps.frame_len_s, clip.duration_s());
}

// ---------------------------------------------------------------------------
// Threshold optimization: grid search picking the setting that keeps recall
// above the target while retaining the least audio.

struct ThresholdGridPoint {
  double loudness_db = 0.0;
  double deviation = 0.0;
  double recall = 0.0;
  double retained_fraction = 0.0;
};

struct ThresholdSearchResult {
  DetectorConfig config;  // template with the chosen thresholds filled in
  double recall = 0.0;
  double retained_fraction = 0.0;
  bool target_met = false;
  bool low_seed_warning = false;  // fewer than kMinSeedCount seeds
  std::vector<ThresholdGridPoint> grid;
};

inline constexpr double kRecallTarget = 0.95;
inline constexpr std::size_t kMinSeedCount = 20;
inline constexpr double kRecallCoverage = 0.5;  // >= 50% of a seed's duration

struct RecordingTraces {
  std::string source_id;
  std::vector<double> envelope_db;
  std::vector<double> deviation;
  double hop_s = 0.0;
  double frame_len_s = 0.0;
  double duration_s = 0.0;
};

inline RecordingTraces compute_traces(const AudioClip& clip,
                                      const GlobalSpectralProfile& profile,
                                      const DetectorConfig& config, const FrameSpec& spec) {
  PowerSpectrogram ps = power_spectrum(clip, spec);
  RecordingTraces tr;
  tr.source_id = clip.source_id;
  tr.envelope_db = band_power_envelope(ps, config);
  tr.deviation = deviation_trace(ps, profile, config);
  tr.hop_s = ps.hop_s;
  tr.frame_len_s = ps.frame_len_s;
  tr.duration_s = clip.duration_s();
  return tr;
}

namespace detect_detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  std::size_t i = static_cast<std::size_t>(pos);
  if (i + 1 >= v.size()) return v.back();
  double frac = pos - static_cast<double>(i);
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

// Fraction of the annotation covered by detected events.
inline double coverage(const TimeInterval& seed, const std::vector<TimeInterval>& events) {
  double covered = 0.0;
  for (const TimeInterval& ev : events) covered += seed.overlap(ev);
  return seed.duration() > 0.0 ? covered / seed.duration() : 0.0;
}

}  // namespace detect_detail

// Grid search over (loudness_db_threshold, deviation_threshold). Loudness
// candidates step 2 dB across [P10, P99.9] of the pooled envelope; deviation
// candidates step 0.02 across the full [0, 1] sup-norm range, so the change
// trigger can be disabled outright when the global profile is dominated by
// the vocalisations themselves. Among settings whose seed recall exceeds
// 0.95 (a seed counts as recalled when at least half its duration is
// covered), the one retaining the least audio wins; ties keep the first in
// scan order. When no setting reaches the target the best-recall setting is
// returned with target_met = false.
inline ThresholdSearchResult optimize_thresholds(
    const std::vector<const AudioClip*>& recordings,
    const std::vector<Annotation>& seed_annotations, const DetectorConfig& config_template,
    const FrameSpec& spec) {
  if (recordings.empty())
    throw PreconditionError("optimize_thresholds: no recordings");
  if (seed_annotations.empty())
    throw PreconditionError("optimize_thresholds: no seed annotations");

  GlobalSpectralProfile profile = build_global_profile(recordings, config_template, spec);
  std::vector<RecordingTraces> traces;
  traces.reserve(recordings.size());
  for (const AudioClip* clip : recordings)
    traces.push_back(compute_traces(*clip, profile, config_template, spec));

  std::vector<double> pooled;
  double total_duration = 0.0;
  for (const auto& tr : traces) {
    pooled.insert(pooled.end(), tr.envelope_db.begin(), tr.envelope_db.end());
    total_duration += tr.duration_s;
  }
  double lo_db = detect_detail::quantile(pooled, 0.10);
  double hi_db = detect_detail::quantile(pooled, 0.999);

  std::vector<double> loudness_grid;
  for (double v = lo_db; v <= hi_db + 1e-9; v += 2.0) loudness_grid.push_back(v);
  if (loudness_grid.empty()) loudness_grid.push_back(lo_db);
  std::vector<double> deviation_grid;
  for (double v = 0.0; v <= 1.0 + 1e-9; v += 0.02) deviation_grid.push_back(std::min(v, 1.0));

  ThresholdSearchResult result;
  result.low_seed_warning = seed_annotations.size() < kMinSeedCount;

  double total_seed = static_cast<double>(seed_annotations.size());
  bool have_choice = false;
  ThresholdGridPoint best_valid{};    // min retained among recall > target
  ThresholdGridPoint best_overall{};  // max recall fallback
  bool have_overall = false;

  for (double loud : loudness_grid) {
    for (double dev : deviation_grid) {
      DetectorConfig cand = config_template;
      cand.loudness_db_threshold = loud;
      cand.deviation_threshold = dev;

      double retained = 0.0;
      std::size_t recalled = 0;
      std::vector<std::pair<std::string, std::vector<TimeInterval>>> per_rec;
      per_rec.reserve(traces.size());
      for (const auto& tr : traces) {
        std::vector<TimeInterval> events = events_from_traces(
            tr.envelope_db, tr.deviation, cand, tr.hop_s, tr.frame_len_s, tr.duration_s);
        for (const TimeInterval& ev : events) retained += ev.duration();
        per_rec.emplace_back(tr.source_id, std::move(events));
      }
      for (const Annotation& seed : seed_annotations) {
        for (const auto& [sid, events] : per_rec) {
          if (sid != seed.source_id) continue;
          if (detect_detail::coverage(seed.interval, events) >= kRecallCoverage) ++recalled;
          break;
        }
      }

      ThresholdGridPoint point;
      point.loudness_db = loud;
      point.deviation = dev;
      point.recall = static_cast<double>(recalled) / total_seed;
      point.retained_fraction = total_duration > 0.0 ? retained / total_duration : 0.0;
      result.grid.push_back(point);

      if (point.recall > kRecallTarget &&
          (!have_choice || point.retained_fraction < best_valid.retained_fraction)) {
        best_valid = point;
        have_choice = true;
      }
      if (!have_overall || point.recall > best_overall.recall ||
          (point.recall == best_overall.recall &&
           point.retained_fraction < best_overall.retained_fraction)) {
        best_overall = point;
        have_overall = true;
      }
    }
  }

  const ThresholdGridPoint& chosen = have_choice ? best_valid : best_overall;
  result.target_met = have_choice;
  result.recall = chosen.recall;
  result.retained_fraction = chosen.retained_fraction;
  result.config = config_template;
  result.config.loudness_db_threshold = chosen.loudness_db;
  result.config.deviation_threshold = chosen.deviation;
  return result;
}

}  // namespace voxkit
