// voxkit/fixtures.hpp
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
// Synthetic fixture corpus: four call archetypes over white-noise beds with
// ground-truth annotations, timestamps and one paired-recorder species.
// Exists because the real dataset is external; every subcommand and the
// acceptance suite can run against this corpus offline. Deterministic for a
// given seed.
//
// Archetypes (all energy below 2 kHz):
//   hoot  - AM-modulated tone ~420 Hz with one harmonic; paired recorders
//   chirp - linear sweep, ~300 Hz up to ~1.5 kHz
//   grunt - low-frequency pulse train (~200 Hz carrier, 20-30 Hz rate)
//   whoop - band-limited noise burst, 900-1900 Hz

#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "voxkit/annotations.hpp"
#include "voxkit/core.hpp"
#include "voxkit/manifest.hpp"
#include "voxkit/rng.hpp"
#include "voxkit/wave.hpp"

namespace voxkit {

struct FixtureParams {
  std::string out_dir;
  int sample_rate = 16000;
  std::size_t sessions_per_species = 6;
  double recording_s = 60.0;
  std::size_t calls_min = 8;
  std::size_t calls_max = 11;
  double snr_min_db = -5.0;   // per-call SNR vs. in-band bed level
  double snr_max_db = 20.0;
  double noise_rms_db = -40.0;  // bed level, dBFS
  double band_high_hz = 2000.0;
  std::uint64_t seed = 1;
};

struct FixtureSummary {
  std::size_t recordings = 0;
  std::size_t annotations = 0;
  std::string manifest_path;
  std::string annotations_path;
};

namespace fixtures_detail {

inline const std::vector<std::string>& species_names() {
  static const std::vector<std::string> names = {"hoot", "chirp", "grunt", "whoop"};
  return names;
}

struct CallPlan {
  double begin_s = 0.0;
  double duration_s = 0.0;
  double snr_db = 0.0;
  std::uint64_t voice_seed = 0;  // per-call timbre randomness
};

inline void hann_edges(std::vector<double>& x, int rate, double edge_s = 0.05) {
  std::size_t e = std::min(x.size() / 2,
                           static_cast<std::size_t>(std::lround(edge_s * rate)));
  for (std::size_t i = 0; i < e; ++i) {
    double w = 0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(e));
    x[i] *= w;
    x[x.size() - 1 - i] *= w;
  }
}

inline std::vector<double> synth_call(const std::string& species, double duration_s,
                                      int rate, Rng& rng) {
  std::size_t n = static_cast<std::size_t>(std::lround(duration_s * rate));
  std::vector<double> x(n, 0.0);
  double dt = 1.0 / rate;

  if (species == "hoot") {
    double f0 = rng.uniform(380.0, 460.0);
    double am_rate = rng.uniform(4.0, 6.0);
    for (std::size_t i = 0; i < n; ++i) {
      double t = static_cast<double>(i) * dt;
      double am = (1.0 + 0.6 * std::sin(2.0 * std::numbers::pi * am_rate * t)) / 1.6;
      x[i] = am * (std::sin(2.0 * std::numbers::pi * f0 * t) +
                   0.5 * std::sin(2.0 * std::numbers::pi * 2.0 * f0 * t));
    }
  } else if (species == "chirp") {
    double f_lo = rng.uniform(250.0, 400.0);
    double f_hi = rng.uniform(1200.0, 1800.0);
    double sweep = (f_hi - f_lo) / duration_s;
    for (std::size_t i = 0; i < n; ++i) {
      double t = static_cast<double>(i) * dt;
      double phase = 2.0 * std::numbers::pi * (f_lo * t + 0.5 * sweep * t * t);
      x[i] = std::sin(phase);
    }
  } else if (species == "grunt") {
    double carrier = rng.uniform(150.0, 250.0);
    double pulse_rate = rng.uniform(20.0, 30.0);
    double pulse_period = 1.0 / pulse_rate;
    for (std::size_t i = 0; i < n; ++i) {
      double t = static_cast<double>(i) * dt;
      double tp = std::fmod(t, pulse_period);
      double env = std::exp(-tp / 0.012);
      x[i] = env * std::sin(2.0 * std::numbers::pi * carrier * t);
    }
  } else {  // whoop: sinusoid comb across 900-1900 Hz
    const int n_components = 60;
    std::vector<double> freqs(n_components), phases(n_components);
    for (int c = 0; c < n_components; ++c) {
      freqs[c] = rng.uniform(900.0, 1900.0);
      phases[c] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    }
    double scale = 1.0 / std::sqrt(static_cast<double>(n_components));
    for (std::size_t i = 0; i < n; ++i) {
      double t = static_cast<double>(i) * dt;
      double acc = 0.0;
      for (int c = 0; c < n_components; ++c)
        acc += std::sin(2.0 * std::numbers::pi * freqs[c] * t + phases[c]);
      x[i] = acc * scale;
    }
  }

  hann_edges(x, rate);
  double rms = 0.0;
  for (double v : x) rms += v * v;
  rms = std::sqrt(rms / static_cast<double>(n));
  if (rms > 0.0)
    for (double& v : x) v /= rms;  // unit RMS; caller applies the SNR gain
  return x;
}

inline std::pair<double, double> species_band(const std::string& species) {
  if (species == "hoot") return {300.0, 1000.0};
  if (species == "chirp") return {250.0, 1800.0};
  if (species == "grunt") return {100.0, 400.0};
  return {900.0, 1900.0};
}

inline double call_duration(const std::string& species, Rng& rng) {
  if (species == "hoot") return rng.uniform(0.6, 1.4);
  if (species == "chirp") return rng.uniform(0.3, 0.8);
  if (species == "grunt") return rng.uniform(0.5, 1.2);
  return rng.uniform(0.4, 1.0);
}

// Non-overlapping call placements with 2 s clearance so detected events do
// not merge across calls.
inline std::vector<CallPlan> plan_calls(const std::string& species, const FixtureParams& p,
                                        Rng& rng) {
  std::size_t target = p.calls_min + rng.uniform_index(p.calls_max - p.calls_min + 1);
  std::vector<CallPlan> plans;
  for (std::size_t c = 0; c < target; ++c) {
    CallPlan plan;
    plan.duration_s = call_duration(species, rng);
    plan.snr_db = rng.uniform(p.snr_min_db, p.snr_max_db);
    plan.voice_seed = rng.next_u64();
    bool placed = false;
    for (int attempt = 0; attempt < 200 && !placed; ++attempt) {
      double begin = rng.uniform(1.0, p.recording_s - plan.duration_s - 1.0);
      bool clash = false;
      for (const CallPlan& other : plans) {
        if (begin < other.begin_s + other.duration_s + 2.0 &&
            other.begin_s < begin + plan.duration_s + 2.0) {
          clash = true;
          break;
        }
      }
      if (!clash) {
        plan.begin_s = begin;
        placed = true;
      }
    }
    if (placed) plans.push_back(plan);
  }
  std::sort(plans.begin(), plans.end(),
            [](const CallPlan& a, const CallPlan& b) { return a.begin_s < b.begin_s; });
  return plans;
}

}  // namespace fixtures_detail

inline FixtureSummary generate_fixtures(const FixtureParams& p) {
  namespace fs = std::filesystem;
  using namespace fixtures_detail;
  if (p.recording_s < 10.0)
    throw ConfigError("gen-fixtures: recordings must be at least 10 s");
  if (p.calls_min < 1 || p.calls_max < p.calls_min)
    throw ConfigError("gen-fixtures: bad call count range");

  fs::create_directories(fs::path(p.out_dir) / "audio");

  double sigma = std::pow(10.0, p.noise_rms_db / 20.0);
  double band_frac = std::min(1.0, p.band_high_hz / (p.sample_rate / 2.0));
  double bed_in_band_rms = sigma * std::sqrt(band_frac);
  double base_time = parse_timestamp("2019-12-01T06:00:00", "fixtures");

  CorpusManifest manifest;
  manifest.label_set = species_names();
  std::vector<Annotation> annotations;
  std::size_t n_recordings = 0;

  const std::size_t n_species = species_names().size();
  for (std::size_t session = 0; session < p.sessions_per_species * n_species; ++session) {
    const std::string& species = species_names()[session % n_species];
    double session_time = base_time + static_cast<double>(session) * 7200.0;
    char session_tag[32];
    std::snprintf(session_tag, sizeof(session_tag), "s%03zu_%s", session, species.c_str());

    Rng plan_rng(subseed(p.seed, std::string("plan/") + session_tag));
    std::vector<CallPlan> plans = plan_calls(species, p, plan_rng);
    auto [band_lo, band_hi] = species_band(species);

    // hoot sessions use two recorders hearing the same calls.
    std::size_t n_recorders = species == "hoot" ? 2 : 1;
    for (std::size_t rec_idx = 0; rec_idx < n_recorders; ++rec_idx) {
      std::string source_id = std::string(session_tag) +
                              (n_recorders == 2 ? (rec_idx == 0 ? "_a" : "_b") : "");
      AudioClip clip;
      clip.sample_rate = p.sample_rate;
      clip.source_id = source_id;
      std::size_t n_samples = static_cast<std::size_t>(std::lround(p.recording_s * p.sample_rate));
      clip.samples.resize(n_samples);

      Rng bed_rng(subseed(p.seed, "bed/" + source_id));
      for (double& v : clip.samples) v = sigma * bed_rng.gaussian();

      double recorder_gain = rec_idx == 0 ? 1.0 : std::pow(10.0, -2.0 / 20.0);
      for (const CallPlan& plan : plans) {
        Rng voice_rng(plan.voice_seed);
        std::vector<double> call = synth_call(species, plan.duration_s, p.sample_rate, voice_rng);
        double gain = bed_in_band_rms * std::pow(10.0, plan.snr_db / 20.0) * recorder_gain;
        std::size_t offset = static_cast<std::size_t>(std::lround(plan.begin_s * p.sample_rate));
        for (std::size_t i = 0; i < call.size() && offset + i < n_samples; ++i)
          clip.samples[offset + i] += gain * call[i];
      }

      std::string rel_path = "audio/" + source_id + ".wav";
      write_wave(clip, (fs::path(p.out_dir) / rel_path).string());

      RecordingInfo info;
      info.source_id = source_id;
      info.path = rel_path;
      info.start_time_s = session_time;
      info.recorder_id = "am" + std::to_string(session % n_species) + std::to_string(rec_idx);
      info.species = species;
      manifest.recordings.push_back(info);
      ++n_recordings;

      for (const CallPlan& plan : plans) {
        Annotation a;
        a.source_id = source_id;
        a.interval = {plan.begin_s, plan.begin_s + plan.duration_s};
        a.label = species;
        a.low_freq_hz = band_lo;
        a.high_freq_hz = band_hi;
        annotations.push_back(a);
      }
    }
    if (n_recorders == 2) {
      manifest.pairing.push_back({std::string(session_tag) + "_a",
                                  std::string(session_tag) + "_b"});
    }
  }

  FixtureSummary summary;
  summary.recordings = n_recordings;
  summary.annotations = annotations.size();
  summary.manifest_path = (fs::path(p.out_dir) / "manifest.txt").string();
  summary.annotations_path = (fs::path(p.out_dir) / "annotations.tsv").string();
  write_manifest(manifest, summary.manifest_path);
  write_annotations(annotations, summary.annotations_path);
  return summary;
}

}  // namespace voxkit
