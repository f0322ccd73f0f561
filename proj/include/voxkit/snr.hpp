// voxkit/snr.hpp
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
// Per-frequency-bin SNR profile: mean vocalisation power minus mean
// background power, in dB, limited to a maximum analysis frequency
// (2 kHz by default). The default averages dB values over frames; averaging
// power before the dB conversion is available as the alternate mode.

#pragma once

#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/spectrogram.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

enum class DbMeanMode { kMeanOfDb, kDbOfMeanPower };

struct SnrProfile {
  std::vector<double> bin_hz;  // bin center frequencies 0..max_hz
  std::vector<double> signal_db;
  std::vector<double> background_db;
  std::vector<double> diff_db;  // signal - background, bin-wise
};

namespace snr_detail {

inline std::vector<double> group_mean_db(const std::vector<const AudioClip*>& chunks,
                                         const FrameSpec& spec, std::size_t n_bins,
                                         DbMeanMode mode) {
  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_frames = 0;
  for (const AudioClip* clip : chunks) {
    std::size_t frame_len = spec.frame_samples(clip->sample_rate);
    if (clip->samples.size() < frame_len) continue;  // shorter than one frame
    PowerSpectrogram ps = power_spectrum(*clip, spec);
    for (std::size_t t = 0; t < ps.frames(); ++t) {
      const double* p = ps.power.row(t);
      for (std::size_t k = 0; k < n_bins; ++k)
        acc[k] += mode == DbMeanMode::kMeanOfDb ? db_from_power(p[k]) : p[k];
    }
    n_frames += ps.frames();
  }
  if (n_frames == 0)
    throw PreconditionError("snr_profile: no chunk is at least one frame long");
  for (double& v : acc) v /= static_cast<double>(n_frames);
  if (mode == DbMeanMode::kDbOfMeanPower)
    for (double& v : acc) v = db_from_power(v);
  return acc;
}

}  // namespace snr_detail

inline SnrProfile snr_profile(const std::vector<const AudioClip*>& signal_chunks,
                              const std::vector<const AudioClip*>& background_chunks,
                              double max_hz, const FrameSpec& spec,
                              DbMeanMode mode = DbMeanMode::kMeanOfDb) {
  if (signal_chunks.empty() || background_chunks.empty())
    throw PreconditionError("snr_profile: both chunk lists must be non-empty");
  int rate = signal_chunks.front()->sample_rate;
  for (const AudioClip* c : signal_chunks)
    if (c->sample_rate != rate) throw PreconditionError("snr_profile: mixed sample rates");
  for (const AudioClip* c : background_chunks)
    if (c->sample_rate != rate) throw PreconditionError("snr_profile: mixed sample rates");

  double bin_hz = static_cast<double>(rate) / static_cast<double>(spec.effective_fft_size(rate));
  std::size_t all_bins = spec.effective_fft_size(rate) / 2 + 1;
  std::size_t n_bins = static_cast<std::size_t>(std::floor(max_hz / bin_hz)) + 1;
  if (n_bins > all_bins) n_bins = all_bins;

  SnrProfile profile;
  profile.signal_db = snr_detail::group_mean_db(signal_chunks, spec, n_bins, mode);
  profile.background_db = snr_detail::group_mean_db(background_chunks, spec, n_bins, mode);
  profile.bin_hz.resize(n_bins);
  profile.diff_db.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    profile.bin_hz[k] = static_cast<double>(k) * bin_hz;
    profile.diff_db[k] = profile.signal_db[k] - profile.background_db[k];
  }
  return profile;
}

inline void write_snr_csv(const SnrProfile& profile, const std::string& path) {
  std::string out = "bin_hz,signal_db,background_db,diff_db\n";
  for (std::size_t k = 0; k < profile.bin_hz.size(); ++k) {
    out += format_double(profile.bin_hz[k]) + "," + format_double(profile.signal_db[k]) + "," +
           format_double(profile.background_db[k]) + "," + format_double(profile.diff_db[k]) +
           "\n";
  }
  write_file_atomic(path, out);
}

// Minimal SVG line plot of the dB difference; a convenience, the CSV is the
// artifact of record.
inline void write_snr_svg(const SnrProfile& profile, const std::string& path) {
  if (profile.bin_hz.empty()) throw PreconditionError("write_snr_svg: empty profile");
  const double w = 800, h = 400, ml = 60, mr = 20, mt = 20, mb = 45;
  double xmax = profile.bin_hz.back();
  double ymin = profile.diff_db[0], ymax = profile.diff_db[0];
  for (double v : profile.diff_db) {
    ymin = std::min(ymin, v);
    ymax = std::max(ymax, v);
  }
  if (ymax - ymin < 1e-9) {
    ymax += 1.0;
    ymin -= 1.0;
  }
  auto sx = [&](double hz) { return ml + (w - ml - mr) * (xmax > 0 ? hz / xmax : 0.0); };
  auto sy = [&](double db) { return mt + (h - mt - mb) * (1.0 - (db - ymin) / (ymax - ymin)); };

  std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='" + format_double(w, 6) +
                    "' height='" + format_double(h, 6) + "'>\n";
  svg += "<rect width='100%' height='100%' fill='white'/>\n";
  svg += "<line x1='" + format_double(ml, 6) + "' y1='" + format_double(h - mb, 6) + "' x2='" +
         format_double(w - mr, 6) + "' y2='" + format_double(h - mb, 6) +
         "' stroke='black'/>\n";
  svg += "<line x1='" + format_double(ml, 6) + "' y1='" + format_double(mt, 6) + "' x2='" +
         format_double(ml, 6) + "' y2='" + format_double(h - mb, 6) + "' stroke='black'/>\n";
  if (ymin < 0.0 && ymax > 0.0) {
    svg += "<line x1='" + format_double(ml, 6) + "' y1='" + format_double(sy(0.0), 6) +
           "' x2='" + format_double(w - mr, 6) + "' y2='" + format_double(sy(0.0), 6) +
           "' stroke='#bbbbbb' stroke-dasharray='4 3'/>\n";
  }
  svg += "<polyline fill='none' stroke='#1f6fb2' stroke-width='1.5' points='";
  for (std::size_t k = 0; k < profile.bin_hz.size(); ++k) {
    if (k) svg += " ";
    svg += format_double(sx(profile.bin_hz[k]), 8) + "," + format_double(sy(profile.diff_db[k]), 8);
  }
  svg += "'/>\n";
  svg += "<text x='" + format_double((ml + w - mr) / 2, 6) + "' y='" + format_double(h - 10, 6) +
         "' font-size='13' text-anchor='middle'>frequency (Hz)</text>\n";
  svg += "<text x='15' y='" + format_double((mt + h - mb) / 2, 6) +
         "' font-size='13' text-anchor='middle' transform='rotate(-90 15 " +
         format_double((mt + h - mb) / 2, 6) + ")'>signal - background (dB)</text>\n";
  svg += "</svg>\n";
  write_file_atomic(path, svg);
}

}  // namespace voxkit
