// voxkit/config.hpp
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
// Shared pipeline configuration: plain-text "key = value" lines, '#'
// comments, dotted keys. Unknown keys are rejected with their line number.
// Grammar and key reference live in docs/formats.md.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/detect.hpp"
#include "voxkit/experiment.hpp"
#include "voxkit/framing.hpp"
#include "voxkit/lld.hpp"
#include "voxkit/rng.hpp"
#include "voxkit/snr.hpp"
#include "voxkit/dataset.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

struct PipelineConfig {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string run_log = "voxkit_run.log";

  FrameSpec frame;
  MfccConfig mfcc;
  RastaPlpConfig plp;
  std::size_t delta_window = 2;

  DetectorConfig detect;
  std::map<std::string, std::map<std::string, double>> species_detect;  // overrides

  NormMode norm = NormMode::kZnL2;
  std::vector<double> c_grid;  // empty = default grid for the norm mode
  SplitRatios ratios;

  double eval_max_hz = 2000.0;
  DbMeanMode db_mean = DbMeanMode::kMeanOfDb;

  LldConfig lld() const {
    LldConfig cfg;
    cfg.mfcc = mfcc;
    cfg.plp = plp;
    cfg.delta_window = delta_window;
    return cfg;
  }

  DetectorConfig detector_for(const std::string& species) const {
    DetectorConfig cfg = detect;
    auto it = species_detect.find(species);
    if (it == species_detect.end()) return cfg;
    for (const auto& [field, value] : it->second) {
      if (field == "band_low_hz") cfg.band_low_hz = value;
      else if (field == "band_high_hz") cfg.band_high_hz = value;
      else if (field == "loudness_db_threshold") cfg.loudness_db_threshold = value;
      else if (field == "deviation_threshold") cfg.deviation_threshold = value;
      else if (field == "local_window_s") cfg.local_window_s = value;
      else if (field == "min_event_s") cfg.min_event_s = value;
      else if (field == "merge_gap_s") cfg.merge_gap_s = value;
      else if (field == "pad_s") cfg.pad_s = value;
    }
    return cfg;
  }
};

// "default", "1e-6..1e1 by decade", or a comma-separated list. All values
// must be positive.
inline std::vector<double> parse_c_grid(const std::string& text, const std::string& context) {
  std::vector<double> grid;
  if (text == "default") return grid;
  std::size_t range = text.find("..");
  if (range != std::string::npos) {
    std::string rest = text.substr(range + 2);
    std::size_t by = rest.find(" by ");
    if (by == std::string::npos)
      throw ConfigError("grid range needs a step clause ('A..B by decade') in " + context);
    std::string step = rest.substr(by + 4);
    if (step != "decade")
      throw ConfigError("unsupported grid step '" + step + "' in " + context);
    double lo = parse_double(text.substr(0, range), context);
    double hi = parse_double(rest.substr(0, by), context);
    if (!(lo > 0.0) || !(hi >= lo))
      throw ConfigError("grid range must satisfy 0 < A <= B in " + context);
    for (double v = lo; v <= hi * (1.0 + 1e-12); v *= 10.0) grid.push_back(v);
  } else {
    for (const std::string& tok : split_line(text, ',')) {
      std::string s = tok;
      s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
      if (s.empty()) continue;
      grid.push_back(parse_double(s, context));
    }
  }
  if (grid.empty()) throw ConfigError("empty C grid in " + context);
  for (double v : grid)
    if (!(v > 0.0)) throw ConfigError("C values must be positive in " + context);
  return grid;
}

namespace config_detail {

inline bool consume_prefix(std::string& key, const std::string& prefix) {
  if (key.rfind(prefix, 0) == 0) {
    key.erase(0, prefix.size());
    return true;
  }
  return false;
}

inline void apply_key(PipelineConfig& cfg, std::string key, const std::string& value,
                      const std::string& where) {
  auto num = [&] { return parse_double(value, where); };
  if (key == "seed") {
    long long v = parse_int(value, where);
    if (v < 0) throw ConfigError("seed must be nonnegative at " + where);
    cfg.seed = static_cast<std::uint64_t>(v);
  } else if (key == "jobs") {
    long long v = parse_int(value, where);
    if (v < 1) throw ConfigError("jobs must be >= 1 at " + where);
    cfg.jobs = static_cast<int>(v);
  } else if (key == "run_log") {
    cfg.run_log = value;
  } else if (key == "frame.len_s") {
    cfg.frame.frame_len_s = num();
  } else if (key == "frame.hop_s") {
    cfg.frame.hop_s = num();
  } else if (key == "frame.window") {
    if (value == "hamming") cfg.frame.window = WindowKind::kHamming;
    else if (value == "hann") cfg.frame.window = WindowKind::kHann;
    else throw ConfigError("frame.window must be hamming or hann at " + where);
  } else if (key == "frame.fft_size") {
    if (value == "auto") cfg.frame.fft_size = 0;
    else {
      long long v = parse_int(value, where);
      if (v <= 0 || !is_power_of_two(static_cast<std::size_t>(v)))
        throw ConfigError("frame.fft_size must be 'auto' or a power of two at " + where);
      cfg.frame.fft_size = static_cast<std::size_t>(v);
    }
  } else if (key == "frame.preemphasis") {
    double v = num();
    if (!(v >= 0.0 && v < 1.0))
      throw ConfigError("frame.preemphasis must be in [0,1) at " + where);
    cfg.frame.preemphasis = v;
  } else if (key == "mfcc.n_mels") {
    long long v = parse_int(value, where);
    if (v < 25) throw ConfigError("mfcc.n_mels must be >= 25 at " + where);
    cfg.mfcc.n_mels = static_cast<std::size_t>(v);
  } else if (key == "mfcc.log_floor") {
    double v = num();
    if (!(v > 0.0)) throw ConfigError("mfcc.log_floor must be positive at " + where);
    cfg.mfcc.log_floor = v;
  } else if (key == "rasta.pole") {
    double v = num();
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("rasta.pole must be in (0,1) at " + where);
    cfg.plp.rasta_pole = v;
  } else if (key == "delta.window") {
    long long v = parse_int(value, where);
    if (v < 1) throw ConfigError("delta.window must be >= 1 at " + where);
    cfg.delta_window = static_cast<std::size_t>(v);
  } else if (consume_prefix(key, "detect.species.")) {
    std::size_t dot = key.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 >= key.size())
      throw ConfigError("expected detect.species.<name>.<field> at " + where);
    std::string species = key.substr(0, dot);
    std::string field = key.substr(dot + 1);
    static const char* kFields[] = {"band_low_hz", "band_high_hz", "loudness_db_threshold",
                                    "deviation_threshold", "local_window_s", "min_event_s",
                                    "merge_gap_s", "pad_s"};
    bool known = false;
    for (const char* f : kFields) known = known || field == f;
    if (!known) throw ConfigError("unknown detector field '" + field + "' at " + where);
    cfg.species_detect[species][field] = num();
  } else if (key == "detect.band_low_hz") {
    cfg.detect.band_low_hz = num();
  } else if (key == "detect.band_high_hz") {
    cfg.detect.band_high_hz = num();
  } else if (key == "detect.loudness_db_threshold") {
    cfg.detect.loudness_db_threshold = num();
  } else if (key == "detect.deviation_threshold") {
    cfg.detect.deviation_threshold = num();
  } else if (key == "detect.local_window_s") {
    cfg.detect.local_window_s = num();
  } else if (key == "detect.min_event_s") {
    cfg.detect.min_event_s = num();
  } else if (key == "detect.merge_gap_s") {
    cfg.detect.merge_gap_s = num();
  } else if (key == "detect.pad_s") {
    cfg.detect.pad_s = num();
  } else if (key == "learn.norm") {
    if (value == "zn") cfg.norm = NormMode::kZn;
    else if (value == "zn+l2") cfg.norm = NormMode::kZnL2;
    else throw ConfigError("learn.norm must be zn or zn+l2 at " + where);
  } else if (key == "learn.c_grid") {
    cfg.c_grid = parse_c_grid(value, where);
  } else if (key == "split.ratios") {
    std::vector<std::string> parts = split_line(value, ':');
    if (parts.size() != 3)
      throw ConfigError("split.ratios must be T:V:E (e.g. 3:1:1) at " + where);
    cfg.ratios.train = static_cast<int>(parse_int(parts[0], where));
    cfg.ratios.valid = static_cast<int>(parse_int(parts[1], where));
    cfg.ratios.test = static_cast<int>(parse_int(parts[2], where));
    if (cfg.ratios.train <= 0 || cfg.ratios.valid <= 0 || cfg.ratios.test <= 0)
      throw ConfigError("split.ratios must be positive at " + where);
  } else if (key == "eval.max_hz") {
    double v = num();
    if (!(v > 0.0)) throw ConfigError("eval.max_hz must be positive at " + where);
    cfg.eval_max_hz = v;
  } else if (key == "eval.db_mean") {
    if (value == "db") cfg.db_mean = DbMeanMode::kMeanOfDb;
    else if (value == "power") cfg.db_mean = DbMeanMode::kDbOfMeanPower;
    else throw ConfigError("eval.db_mean must be db or power at " + where);
  } else {
    throw ConfigError("unknown config key '" + key + "' at " + where);
  }
}

}  // namespace config_detail

inline PipelineConfig load_config(const std::string& path) {
  std::string text = read_text_file(path);
  PipelineConfig cfg;

  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = (eol == std::string::npos) ? text.substr(pos)
                                                  : text.substr(pos, eol - pos);
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at " + where);
    config_detail::apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
  }

  // Cross-field validation. The run log's directory must exist up front so a
  // run never fails at the final provenance append.
  if (!(cfg.frame.hop_s > 0.0) || cfg.frame.frame_len_s < cfg.frame.hop_s)
    throw ConfigError("frame.len_s must be >= frame.hop_s > 0 in " + path);
  std::filesystem::path log_dir = std::filesystem::path(cfg.run_log).parent_path();
  if (!log_dir.empty() && !std::filesystem::exists(log_dir))
    throw ConfigError("run_log directory does not exist: " + log_dir.string());
  return cfg;
}

inline std::string print_config(const PipelineConfig& cfg) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  if (cfg.seed) kv("seed", std::to_string(*cfg.seed));
  kv("jobs", std::to_string(cfg.jobs));
  kv("run_log", cfg.run_log);
  kv("frame.len_s", format_double(cfg.frame.frame_len_s));
  kv("frame.hop_s", format_double(cfg.frame.hop_s));
  kv("frame.window", cfg.frame.window == WindowKind::kHamming ? "hamming" : "hann");
  kv("frame.fft_size", cfg.frame.fft_size ? std::to_string(cfg.frame.fft_size) : "auto");
  kv("frame.preemphasis", format_double(cfg.frame.preemphasis));
  kv("mfcc.n_mels", std::to_string(cfg.mfcc.n_mels));
  kv("mfcc.log_floor", format_double(cfg.mfcc.log_floor));
  kv("rasta.pole", format_double(cfg.plp.rasta_pole));
  kv("delta.window", std::to_string(cfg.delta_window));
  kv("detect.band_low_hz", format_double(cfg.detect.band_low_hz));
  kv("detect.band_high_hz", format_double(cfg.detect.band_high_hz));
  kv("detect.loudness_db_threshold", format_double(cfg.detect.loudness_db_threshold));
  kv("detect.deviation_threshold", format_double(cfg.detect.deviation_threshold));
  kv("detect.local_window_s", format_double(cfg.detect.local_window_s));
  kv("detect.min_event_s", format_double(cfg.detect.min_event_s));
  kv("detect.merge_gap_s", format_double(cfg.detect.merge_gap_s));
  kv("detect.pad_s", format_double(cfg.detect.pad_s));
  for (const auto& [species, fields] : cfg.species_detect)
    for (const auto& [field, value] : fields)
      kv("detect.species." + species + "." + field, format_double(value));
  kv("learn.norm", norm_mode_name(cfg.norm));
  if (cfg.c_grid.empty()) {
    kv("learn.c_grid", "default");
  } else {
    std::string list;
    for (std::size_t i = 0; i < cfg.c_grid.size(); ++i) {
      if (i) list += ",";
      list += format_double(cfg.c_grid[i]);
    }
    kv("learn.c_grid", list);
  }
  kv("split.ratios", std::to_string(cfg.ratios.train) + ":" + std::to_string(cfg.ratios.valid) +
                         ":" + std::to_string(cfg.ratios.test));
  kv("eval.max_hz", format_double(cfg.eval_max_hz));
  kv("eval.db_mean", cfg.db_mean == DbMeanMode::kMeanOfDb ? "db" : "power");
  return out;
}

inline std::uint64_t config_hash(const PipelineConfig& cfg) {
  return fnv1a64(print_config(cfg));
}

}  // namespace voxkit
