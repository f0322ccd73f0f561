// voxkit/dataset.hpp
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
// Chronological 3:1:1 splitting (train = oldest, test = newest) at
// session-group granularity, and duration-matched background sampling.

#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/manifest.hpp"
#include "voxkit/rng.hpp"

namespace voxkit {

enum class Split { kTrain, kValid, kTest };

inline const char* split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    default: return "test";
  }
}

struct SplitRatios {
  int train = 3;
  int valid = 1;
  int test = 1;
};

struct SplitSpec {
  std::vector<Split> assignment;  // parallel to the input annotation order
  double train_fraction = 0.0;    // achieved, by chunk duration
  double valid_fraction = 0.0;
  double test_fraction = 0.0;
};

// Chunks are ordered by absolute start time (recording timestamp + offset).
// Split boundaries are placed at the session-group boundaries closest to the
// requested duration quantiles; paired recorders always land in one split.
// Exact ratios are generally unattainable, so the achieved fractions are
// reported.
inline SplitSpec chronological_split(const std::vector<Annotation>& annotations,
                                     const CorpusManifest& manifest,
                                     const SplitRatios& ratios = {}) {
  if (annotations.empty()) throw PreconditionError("chronological_split: no annotations");
  if (ratios.train <= 0 || ratios.valid <= 0 || ratios.test <= 0)
    throw ConfigError("chronological_split: ratios must be positive");

  struct GroupInfo {
    double start_time = 0.0;
    double duration = 0.0;
    std::vector<std::size_t> chunk_indices;
  };
  std::map<std::string, GroupInfo> groups;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const Annotation& a = annotations[i];
    const RecordingInfo* rec = manifest.find(a.source_id);
    if (!rec)
      throw ProtocolError("chronological_split: no manifest timestamp for source_id '" +
                          a.source_id + "'");
    double abs_time = rec->start_time_s + a.interval.begin_s;
    std::string key = manifest.session_group(a.source_id);
    auto [it, fresh] = groups.try_emplace(key);
    GroupInfo& g = it->second;
    if (fresh || abs_time < g.start_time) g.start_time = abs_time;
    g.duration += a.interval.duration();
    g.chunk_indices.push_back(i);
  }

  std::vector<std::pair<std::string, GroupInfo>> ordered(groups.begin(), groups.end());
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.second.start_time != b.second.start_time)
      return a.second.start_time < b.second.start_time;
    return a.first < b.first;
  });

  double total = 0.0;
  for (const auto& [key, g] : ordered) total += g.duration;
  double r_sum = static_cast<double>(ratios.train + ratios.valid + ratios.test);
  double q1 = total * static_cast<double>(ratios.train) / r_sum;
  double q2 = total * static_cast<double>(ratios.train + ratios.valid) / r_sum;

  // Candidate cuts sit after group g; pick the ones nearest the quantiles.
  const std::size_t n_groups = ordered.size();
  std::vector<double> cumulative(n_groups + 1, 0.0);
  for (std::size_t g = 0; g < n_groups; ++g)
    cumulative[g + 1] = cumulative[g] + ordered[g].second.duration;

  auto nearest_cut = [&](double target, std::size_t lo, std::size_t hi) {
    std::size_t best = lo;
    double best_err = std::abs(cumulative[lo] - target);
    for (std::size_t g = lo + 1; g <= hi; ++g) {
      double err = std::abs(cumulative[g] - target);
      if (err < best_err) {
        best = g;
        best_err = err;
      }
    }
    return best;
  };

  std::size_t cut1, cut2;
  if (n_groups >= 3) {
    cut1 = nearest_cut(q1, 1, n_groups - 2);
    cut2 = nearest_cut(q2, cut1 + 1, n_groups - 1);
  } else if (n_groups == 2) {
    cut1 = 1;
    cut2 = 2;  // degenerate: no test groups left
  } else {
    cut1 = cut2 = 1;
  }

  SplitSpec spec;
  spec.assignment.resize(annotations.size(), Split::kTrain);
  double d_train = 0.0, d_valid = 0.0, d_test = 0.0;
  for (std::size_t g = 0; g < n_groups; ++g) {
    Split s = g < cut1 ? Split::kTrain : (g < cut2 ? Split::kValid : Split::kTest);
    for (std::size_t idx : ordered[g].second.chunk_indices) spec.assignment[idx] = s;
    double dur = ordered[g].second.duration;
    (s == Split::kTrain ? d_train : s == Split::kValid ? d_valid : d_test) += dur;
  }
  if (total > 0.0) {
    spec.train_fraction = d_train / total;
    spec.valid_fraction = d_valid / total;
    spec.test_fraction = d_test / total;
  }
  return spec;
}

// ---------------------------------------------------------------------------
// Background sampling: one background chunk per annotated chunk, identical
// duration, drawn uniformly from unannotated regions of the species' own
// recordings, overlapping neither annotations nor one another. Deterministic
// given the seed.

struct RecordingExtent {
  std::string source_id;
  std::string species;
  double duration_s = 0.0;
};

inline constexpr std::size_t kBackgroundRetryCap = 10000;

inline std::vector<Annotation> sample_background(const std::vector<RecordingExtent>& recordings,
                                                 const std::vector<Annotation>& annotations,
                                                 std::uint64_t seed) {
  if (annotations.empty()) return {};

  // Occupied intervals per recording: every annotation, any species, plus
  // chunks placed so far.
  std::map<std::string, std::vector<TimeInterval>> occupied;
  for (const Annotation& a : annotations) occupied[a.source_id].push_back(a.interval);

  // Species processed in sorted order, chunks in input order within species.
  std::map<std::string, std::vector<const Annotation*>> by_species;
  for (const Annotation& a : annotations) {
    if (a.label == kBackgroundLabel) continue;
    by_species[a.label].push_back(&a);
  }

  std::vector<Annotation> out;
  for (const auto& [species, chunks] : by_species) {
    std::vector<const RecordingExtent*> recs;
    double total = 0.0;
    for (const RecordingExtent& r : recordings) {
      if (r.species == species) {
        recs.push_back(&r);
        total += r.duration_s;
      }
    }
    if (recs.empty())
      throw ExhaustionError("sample_background: no recordings for species '" + species + "'");

    Rng rng(subseed(seed, "background/" + species));
    std::size_t shortfall = 0;
    double shortfall_s = 0.0;
    for (const Annotation* chunk : chunks) {
      double dur = chunk->interval.duration();
      bool placed = false;
      for (std::size_t attempt = 0; attempt < kBackgroundRetryCap; ++attempt) {
        double pos = rng.uniform01() * total;
        const RecordingExtent* rec = nullptr;
        for (const RecordingExtent* r : recs) {
          if (pos < r->duration_s) {
            rec = r;
            break;
          }
          pos -= r->duration_s;
        }
        if (!rec) rec = recs.back();
        if (pos + dur > rec->duration_s) continue;
        // Realign the start so end - begin reproduces the duration exactly;
        // the matched-duration contract is exact, not approximate.
        double end = pos + dur;
        double begin = end - dur;
        if (!(begin >= 0.0) || end - begin != dur || end > rec->duration_s) continue;
        TimeInterval cand{begin, end};
        bool clash = false;
        for (const TimeInterval& iv : occupied[rec->source_id]) {
          if (cand.overlaps(iv)) {
            clash = true;
            break;
          }
        }
        if (clash) continue;

        occupied[rec->source_id].push_back(cand);
        Annotation bg;
        bg.source_id = rec->source_id;
        bg.interval = cand;
        bg.label = kBackgroundLabel;
        out.push_back(std::move(bg));
        placed = true;
        break;
      }
      if (!placed) {
        ++shortfall;
        shortfall_s += dur;
      }
    }
    if (shortfall > 0)
      throw ExhaustionError("sample_background: could not place " + std::to_string(shortfall) +
                            " chunk(s) (" + format_double(shortfall_s, 6) + " s) for species '" +
                            species + "' within " + std::to_string(kBackgroundRetryCap) +
                            " attempts each");
  }
  return out;
}

}  // namespace voxkit
