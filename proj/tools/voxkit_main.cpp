// tools/voxkit_main.cpp
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
// voxkit command line: the annotation pipeline (detect, optimize-thresholds,
// condense, lift), feature extraction, dataset handling (split,
// sample-background), learning (train, grid-search, predict, evaluate), the
// SNR profile, and a synthetic fixture generator.
//
// Exit codes: 0 success, 1 processing error, 2 usage error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "voxkit/annotations.hpp"
#include "voxkit/chunks.hpp"
#include "voxkit/condense.hpp"
#include "voxkit/config.hpp"
#include "voxkit/dataset.hpp"
#include "voxkit/detect.hpp"
#include "voxkit/experiment.hpp"
#include "voxkit/fixtures.hpp"
#include "voxkit/functionals.hpp"
#include "voxkit/kelm.hpp"
#include "voxkit/lld.hpp"
#include "voxkit/manifest.hpp"
#include "voxkit/metrics.hpp"
#include "voxkit/parallel.hpp"
#include "voxkit/snr.hpp"
#include "voxkit/version.hpp"
#include "voxkit/wave.hpp"

namespace {

using namespace voxkit;
namespace fs = std::filesystem;

struct GlobalArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  bool print_config = false;
};

PipelineConfig effective_config(const GlobalArgs& g) {
  PipelineConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.jobs) cfg.jobs = *g.jobs;
  return cfg;
}

std::uint64_t require_seed(const PipelineConfig& cfg, const char* what) {
  if (!cfg.seed)
    throw ConfigError(std::string(what) + " needs a seed (--seed or 'seed' in the config)");
  return *cfg.seed;
}

void append_run_log(const PipelineConfig& cfg, int argc, char** argv, int status) {
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
  char hash[24];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  std::string line = std::string(stamp) + "\tvoxkit " + kVersion + "\tconfig=" + hash +
                     "\tstatus=" + std::to_string(status) + "\t";
  for (int i = 1; i < argc; ++i) {
    if (i > 1) line += ' ';
    line += argv[i];
  }
  line += '\n';
  std::ofstream log(cfg.run_log, std::ios::app);
  if (log) log << line;
}

// ---------------------------------------------------------------------------
// Shared helpers.

std::vector<std::string> species_recordings(const CorpusManifest& manifest,
                                            const std::string& species) {
  std::vector<std::string> ids;
  for (const RecordingInfo& rec : manifest.recordings)
    if (rec.species == species) ids.push_back(rec.source_id);
  if (ids.empty())
    throw ReferenceError("no recordings for species '" + species + "' in the manifest");
  return ids;
}

std::vector<Annotation> read_annotation_files(const std::vector<std::string>& paths,
                                              const CorpusManifest& manifest) {
  std::vector<Annotation> all;
  for (const std::string& path : paths) {
    std::vector<Annotation> part = read_annotations(path, manifest);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

void write_events_tsv(const std::vector<std::pair<std::string, std::vector<TimeInterval>>>& events,
                      const std::string& path) {
  std::string out = "source_id\tbegin_s\tend_s\n";
  for (const auto& [source_id, list] : events)
    for (const TimeInterval& ev : list)
      out += source_id + "\t" + format_double(ev.begin_s) + "\t" + format_double(ev.end_s) + "\n";
  write_file_atomic(path, out);
}

std::map<std::string, std::vector<TimeInterval>> read_events_tsv(const std::string& path) {
  Table t = read_table(path, '\t');
  int sid = t.column("source_id"), b = t.column("begin_s"), e = t.column("end_s");
  if (sid < 0 || b < 0 || e < 0)
    throw SchemaError("events file needs columns source_id, begin_s, end_s: " + path);
  std::map<std::string, std::vector<TimeInterval>> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::string where = path + " row " + std::to_string(r + 1);
    out[row[static_cast<std::size_t>(sid)]].push_back(
        {parse_double(row[static_cast<std::size_t>(b)], where),
         parse_double(row[static_cast<std::size_t>(e)], where)});
  }
  return out;
}

// Splits file: chunk key + assigned split, one row per annotation.
void write_splits_tsv(const std::vector<Annotation>& annotations, const SplitSpec& spec,
                      const std::string& path) {
  std::string out = "source_id\tbegin_s\tend_s\tlabel\tsplit\n";
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const Annotation& a = annotations[i];
    out += a.source_id + "\t" + format_double(a.interval.begin_s) + "\t" +
           format_double(a.interval.end_s) + "\t" + a.label + "\t" +
           split_name(spec.assignment[i]) + "\n";
  }
  write_file_atomic(path, out);
}

std::map<std::string, Split> read_splits_tsv(const std::string& path) {
  Table t = read_table(path, '\t');
  int sid = t.column("source_id"), b = t.column("begin_s"), e = t.column("end_s");
  int sp = t.column("split");
  if (sid < 0 || b < 0 || e < 0 || sp < 0)
    throw SchemaError("splits file needs columns source_id, begin_s, end_s, split: " + path);
  std::map<std::string, Split> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::string key = row[static_cast<std::size_t>(sid)] + "@" +
                      row[static_cast<std::size_t>(b)] + ":" + row[static_cast<std::size_t>(e)];
    const std::string& name = row[static_cast<std::size_t>(sp)];
    Split s;
    if (name == "train") s = Split::kTrain;
    else if (name == "valid") s = Split::kValid;
    else if (name == "test") s = Split::kTest;
    else throw FormatError("unknown split '" + name + "' in " + path);
    out[key] = s;
  }
  return out;
}

std::string chunk_key(const ChunkRef& ref) {
  return ref.source_id + "@" + format_double(ref.interval.begin_s) + ":" +
         format_double(ref.interval.end_s);
}

// Features partitioned by the splits file; rows without a split entry fail.
struct PartitionedFeatures {
  std::vector<FeatureVector> train, valid, test;
};

PartitionedFeatures partition_features(const std::vector<FeatureVector>& features,
                                       const std::map<std::string, Split>& splits,
                                       bool include_background) {
  PartitionedFeatures out;
  for (const FeatureVector& fv : features) {
    if (!include_background && fv.label == kBackgroundLabel) continue;
    auto it = splits.find(chunk_key(fv.chunk_ref));
    if (it == splits.end())
      throw ProtocolError("no split assignment for chunk " + chunk_key(fv.chunk_ref));
    (it->second == Split::kTrain ? out.train
     : it->second == Split::kValid ? out.valid
                                   : out.test)
        .push_back(fv);
  }
  return out;
}

std::vector<std::string> task_labels(const CorpusManifest& manifest, const std::string& task) {
  std::vector<std::string> labels = manifest.label_set;
  if (task == "five") labels.push_back(kBackgroundLabel);
  else if (task != "four") throw ConfigError("task must be 'four' or 'five'");
  return labels;
}

// Background chunks inherit the split of their recording's other chunks;
// a background chunk on a recording with no labeled chunks follows the
// recording session's group assignment, which partition_features cannot see.
// The splits file therefore must contain every chunk, background included;
// `split` writes whatever annotations it was given.

// ---------------------------------------------------------------------------
// Subcommand implementations.

int cmd_gen_fixtures(const GlobalArgs& g, const FixtureParams& params_in) {
  PipelineConfig cfg = effective_config(g);
  FixtureParams params = params_in;
  params.seed = require_seed(cfg, "gen-fixtures");
  FixtureSummary summary = generate_fixtures(params);
  std::cout << "fixtures: " << summary.recordings << " recordings, " << summary.annotations
            << " annotations\n"
            << "manifest: " << summary.manifest_path << "\n"
            << "annotations: " << summary.annotations_path << "\n";
  return 0;
}

int cmd_detect(const GlobalArgs& g, const std::string& manifest_path,
               std::vector<std::string> species, const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  if (species.empty()) species = manifest.label_set;

  ClipCache cache(manifest);
  std::vector<std::pair<std::string, std::vector<TimeInterval>>> all_events;
  for (const std::string& sp : species) {
    DetectorConfig det = cfg.detector_for(sp);
    std::vector<std::string> ids = species_recordings(manifest, sp);
    std::vector<const AudioClip*> clips;
    for (const std::string& id : ids) clips.push_back(&cache.get(id));
    GlobalSpectralProfile profile = build_global_profile(clips, det, cfg.frame);
    for (const AudioClip* clip : clips)
      all_events.emplace_back(clip->source_id, detect_events(*clip, profile, det, cfg.frame));
  }
  write_events_tsv(all_events, out_path);
  std::size_t n = 0;
  for (const auto& [id, evs] : all_events) n += evs.size();
  std::cout << "detected " << n << " events -> " << out_path << "\n";
  return 0;
}

int cmd_optimize_thresholds(const GlobalArgs& g, const std::string& manifest_path,
                            const std::string& species, const std::string& seeds_path,
                            const std::string& out_path, const std::string& out_config_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  std::vector<Annotation> seeds_all = read_annotations(seeds_path, manifest);

  ClipCache cache(manifest);
  std::vector<std::string> ids = species_recordings(manifest, species);
  std::set<std::string> id_set(ids.begin(), ids.end());
  std::vector<const AudioClip*> clips;
  for (const std::string& id : ids) clips.push_back(&cache.get(id));

  std::vector<Annotation> seeds;
  for (const Annotation& a : seeds_all)
    if (a.label == species && id_set.count(a.source_id)) seeds.push_back(a);

  ThresholdSearchResult result =
      optimize_thresholds(clips, seeds, cfg.detector_for(species), cfg.frame);

  std::string out = "loudness_db\tdeviation\trecall\tretained_fraction\tchosen\n";
  for (const ThresholdGridPoint& p : result.grid) {
    bool chosen = p.loudness_db == result.config.loudness_db_threshold &&
                  p.deviation == result.config.deviation_threshold;
    out += format_double(p.loudness_db, 8) + "\t" + format_double(p.deviation, 8) + "\t" +
           format_double(p.recall, 8) + "\t" + format_double(p.retained_fraction, 8) + "\t" +
           (chosen ? "1" : "0") + "\n";
  }
  write_file_atomic(out_path, out);

  if (!out_config_path.empty()) {
    std::string snippet =
        "detect.species." + species + ".loudness_db_threshold = " +
        format_double(result.config.loudness_db_threshold) + "\n" +
        "detect.species." + species + ".deviation_threshold = " +
        format_double(result.config.deviation_threshold) + "\n";
    write_file_atomic(out_config_path, snippet);
  }

  if (result.low_seed_warning)
    std::cerr << "warning: only " << seeds.size()
              << " seed annotations; threshold optimization may be unreliable\n";
  std::cout << "species " << species << ": loudness_db_threshold="
            << format_double(result.config.loudness_db_threshold, 8)
            << " deviation_threshold=" << format_double(result.config.deviation_threshold, 8)
            << " recall=" << format_double(result.recall, 6)
            << " retained_fraction=" << format_double(result.retained_fraction, 6)
            << (result.target_met ? "" : " (recall target not met)") << "\n";
  return 0;
}

int cmd_condense(const GlobalArgs& g, const std::string& manifest_path,
                 const std::string& events_path, const std::string& out_audio,
                 const std::string& out_index) {
  PipelineConfig cfg = effective_config(g);
  (void)cfg;
  CorpusManifest manifest = read_manifest(manifest_path);
  std::map<std::string, std::vector<TimeInterval>> events = read_events_tsv(events_path);

  ClipCache cache(manifest);
  std::vector<RecordingEvents> inputs;
  for (const auto& [source_id, list] : events) {
    const RecordingInfo* rec = manifest.find(source_id);
    if (!rec) throw ReferenceError("events reference unknown source_id '" + source_id + "'");
    RecordingEvents in;
    in.clip = &cache.get(source_id);
    in.start_time_s = rec->start_time_s;
    in.events = list;
    inputs.push_back(std::move(in));
  }
  auto [clip, index] = condense(std::move(inputs));
  if (clip.samples.empty())
    throw PreconditionError("condense: no events to bundle");
  write_wave(clip, out_audio);
  write_index_tsv(index, out_index);
  std::cout << "condensed " << format_double(index.total_condensed_s, 6) << " s of "
            << format_double(index.total_source_s, 6) << " s (" << index.entries.size()
            << " fragments) -> " << out_audio << "\n";
  return 0;
}

int cmd_lift(const GlobalArgs& g, const std::string& manifest_path, const std::string& index_path,
             const std::string& annotations_path, const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  (void)cfg;
  CorpusManifest manifest = read_manifest(manifest_path);
  CondensedIndex index = read_index_tsv(index_path);

  // Annotations made on the condensed file resolve against a single
  // pseudo-recording; labels still come from the real label set.
  CorpusManifest pseudo;
  pseudo.label_set = manifest.label_set;
  RecordingInfo rec;
  rec.source_id = "condensed";
  rec.path = "condensed.wav";
  pseudo.recordings.push_back(rec);
  SelectionTableOptions opt;
  std::vector<Annotation> condensed = read_annotations(annotations_path, pseudo, opt);

  std::vector<Annotation> lifted = lift_annotations(condensed, index);
  write_annotations(lifted, out_path);
  std::cout << "lifted " << condensed.size() << " condensed annotations to " << lifted.size()
            << " source annotations -> " << out_path << "\n";
  return 0;
}

int cmd_extract_features(const GlobalArgs& g, const std::string& manifest_path,
                         const std::vector<std::string>& annotation_paths,
                         const std::string& out_path, const std::string& lld_dir) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  std::vector<Annotation> annotations = read_annotation_files(annotation_paths, manifest);
  if (annotations.empty()) throw PreconditionError("extract-features: no annotations");

  ClipCache cache(manifest);
  // Load serially (the cache is not thread-safe), extract in parallel.
  for (const Annotation& a : annotations) cache.get(a.source_id);

  LldConfig lld_cfg = cfg.lld();
  std::vector<FeatureVector> features(annotations.size());
  std::vector<LldMatrix> llds(lld_dir.empty() ? 0 : annotations.size());
  parallel_for(annotations.size(), cfg.jobs, [&](std::size_t i) {
    const Annotation& a = annotations[i];
    AudioClip chunk = slice_clip(cache.get(a.source_id), a.interval);
    LldMatrix lld = extract_lld(chunk, cfg.frame, lld_cfg);
    FeatureVector fv = summarize(lld);
    fv.label = a.label;
    fv.chunk_ref = {a.source_id, a.interval};
    features[i] = std::move(fv);
    if (!lld_dir.empty()) llds[i] = std::move(lld);
  });

  if (!lld_dir.empty()) {
    fs::create_directories(lld_dir);
    for (std::size_t i = 0; i < annotations.size(); ++i) {
      std::string name = annotations[i].source_id + "_" +
                         format_double(annotations[i].interval.begin_s, 6) + "_" +
                         format_double(annotations[i].interval.end_s, 6) + ".csv";
      write_lld_csv(llds[i], (fs::path(lld_dir) / name).string());
    }
  }
  write_features_csv(features, out_path);
  std::cout << "extracted " << features.size() << " x " << kFeatureDims << " features -> "
            << out_path << "\n";
  return 0;
}

int cmd_split(const GlobalArgs& g, const std::string& manifest_path,
              const std::vector<std::string>& annotation_paths, const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  std::vector<Annotation> annotations = read_annotation_files(annotation_paths, manifest);
  SplitSpec spec = chronological_split(annotations, manifest, cfg.ratios);
  write_splits_tsv(annotations, spec, out_path);
  std::cout << "split " << annotations.size() << " chunks; achieved "
            << format_double(spec.train_fraction, 4) << "/"
            << format_double(spec.valid_fraction, 4) << "/"
            << format_double(spec.test_fraction, 4) << " by duration -> " << out_path << "\n";
  return 0;
}

int cmd_sample_background(const GlobalArgs& g, const std::string& manifest_path,
                          const std::vector<std::string>& annotation_paths,
                          const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  std::uint64_t seed = require_seed(cfg, "sample-background");
  CorpusManifest manifest = read_manifest(manifest_path);
  std::vector<Annotation> annotations = read_annotation_files(annotation_paths, manifest);

  std::vector<RecordingExtent> extents;
  for (const RecordingInfo& rec : manifest.recordings) {
    WaveInfo info = probe_wave(manifest.resolve_path(rec));
    extents.push_back({rec.source_id, rec.species, info.duration_s()});
  }
  std::vector<Annotation> background = sample_background(extents, annotations, seed);
  write_annotations(background, out_path);
  std::cout << "sampled " << background.size() << " background chunks -> " << out_path << "\n";
  return 0;
}

int cmd_train(const GlobalArgs& g, const std::string& manifest_path,
              const std::vector<std::string>& feature_paths, const std::string& splits_path,
              const std::string& task, double c_value, const std::string& norm_flag,
              const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  NormMode mode = norm_flag.empty() ? cfg.norm
                  : norm_flag == "zn" ? NormMode::kZn
                  : norm_flag == "zn+l2" ? NormMode::kZnL2
                  : throw ConfigError("--norm must be zn or zn+l2");
  if (!(c_value > 0.0)) throw ConfigError("--c must be positive");

  std::vector<FeatureVector> features;
  for (const std::string& p : feature_paths) {
    std::vector<FeatureVector> part = read_features_csv(p);
    features.insert(features.end(), part.begin(), part.end());
  }
  std::map<std::string, Split> splits = read_splits_tsv(splits_path);
  PartitionedFeatures parts = partition_features(features, splits, task == "five");
  std::vector<std::string> labels = task_labels(manifest, task);

  NormStats norm = fit_norm(parts.train, mode == NormMode::kZnL2);
  Eigen::MatrixXd x = to_matrix(parts.train, norm);
  std::vector<std::string> row_labels;
  for (const FeatureVector& fv : parts.train) row_labels.push_back(fv.label);
  KelmModel model = train_kelm(x, row_labels, labels, c_value, norm);
  save_model(model, out_path);
  std::cout << "trained on " << parts.train.size() << " chunks (C=" << format_double(c_value, 6)
            << ", " << norm_mode_name(mode) << ") -> " << out_path << "\n";
  return 0;
}

int cmd_grid_search(const GlobalArgs& g, const std::string& manifest_path,
                    const std::vector<std::string>& feature_paths, const std::string& splits_path,
                    const std::string& task, const std::string& norm_flag,
                    const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  NormMode mode = norm_flag.empty() ? cfg.norm
                  : norm_flag == "zn" ? NormMode::kZn
                  : norm_flag == "zn+l2" ? NormMode::kZnL2
                  : throw ConfigError("--norm must be zn or zn+l2");

  std::vector<FeatureVector> features;
  for (const std::string& p : feature_paths) {
    std::vector<FeatureVector> part = read_features_csv(p);
    features.insert(features.end(), part.begin(), part.end());
  }
  std::map<std::string, Split> splits = read_splits_tsv(splits_path);
  PartitionedFeatures parts = partition_features(features, splits, task == "five");
  std::vector<std::string> labels = task_labels(manifest, task);

  GridSearchReport report = grid_search(parts.train, parts.valid, cfg.c_grid, mode, labels);
  std::string out = "c\taccuracy\tuar\tmissing_classes\n";
  for (const GridPointReport& p : report.points)
    out += format_double(p.c, 8) + "\t" + format_double(p.accuracy, 8) + "\t" +
           format_double(p.uar, 8) + "\t" + std::to_string(p.missing_classes) + "\n";
  write_file_atomic(out_path, out);

  if (report.degenerate_valid_warning)
    std::cerr << "warning: validation set is missing at least one class; "
                 "UAR computed over present classes\n";
  std::cout << "best C = " << format_double(report.best_c, 8)
            << " (validation UAR " << format_double(report.best_uar, 6) << ") -> " << out_path
            << "\n";
  return 0;
}

int cmd_predict(const GlobalArgs& g, const std::string& model_path,
                const std::vector<std::string>& feature_paths, const std::string& out_path) {
  PipelineConfig cfg = effective_config(g);
  (void)cfg;
  KelmModel model = load_model(model_path);
  std::vector<FeatureVector> features;
  for (const std::string& p : feature_paths) {
    std::vector<FeatureVector> part = read_features_csv(p);
    features.insert(features.end(), part.begin(), part.end());
  }
  std::string out = "source_id\tbegin_s\tend_s\ttruth\tpredicted";
  for (const std::string& l : model.labels) out += "\tscore_" + l;
  out += "\n";
  for (const FeatureVector& fv : features) {
    Prediction p = predict_raw(model, fv.values);
    out += fv.chunk_ref.source_id + "\t" + format_double(fv.chunk_ref.interval.begin_s) + "\t" +
           format_double(fv.chunk_ref.interval.end_s) + "\t" + fv.label + "\t" + p.label;
    for (double s : p.scores) out += "\t" + format_double(s, 8);
    out += "\n";
  }
  write_file_atomic(out_path, out);
  std::cout << "predicted " << features.size() << " chunks -> " << out_path << "\n";
  return 0;
}

int cmd_evaluate(const GlobalArgs& g, const std::string& manifest_path,
                 const std::vector<std::string>& feature_paths, const std::string& splits_path,
                 const std::string& task_flag, const std::string& norm_flag,
                 const std::string& out_path, const std::string& confusion_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);

  std::vector<FeatureVector> features;
  for (const std::string& p : feature_paths) {
    std::vector<FeatureVector> part = read_features_csv(p);
    features.insert(features.end(), part.begin(), part.end());
  }
  std::map<std::string, Split> splits = read_splits_tsv(splits_path);

  std::vector<std::string> tasks;
  if (task_flag == "both") tasks = {"four", "five"};
  else tasks = {task_flag};
  std::vector<NormMode> modes;
  if (norm_flag == "both") modes = {NormMode::kZn, NormMode::kZnL2};
  else if (norm_flag == "zn") modes = {NormMode::kZn};
  else if (norm_flag == "zn+l2") modes = {NormMode::kZnL2};
  else throw ConfigError("--norm must be zn, zn+l2 or both");

  std::string out = "task\tnorm\tbest_c\tvalid_accuracy\tvalid_uar\ttest_accuracy\ttest_uar\n";
  std::string confusions;
  for (const std::string& task : tasks) {
    PartitionedFeatures parts = partition_features(features, splits, task == "five");
    std::vector<std::string> labels = task_labels(manifest, task);
    for (NormMode mode : modes) {
      GridSearchReport gs = grid_search(parts.train, parts.valid, cfg.c_grid, mode, labels);
      double valid_acc = 0.0;
      for (const GridPointReport& p : gs.points)
        if (p.c == gs.best_c) valid_acc = p.accuracy;
      // Single test probe per (task, norm) combination.
      TestReport tr = refit_and_test(parts.train, parts.valid, parts.test, gs.best_c, mode, labels);
      out += task + "\t" + norm_mode_name(mode) + "\t" + format_double(gs.best_c, 8) + "\t" +
             format_double(valid_acc, 8) + "\t" + format_double(gs.best_uar, 8) + "\t" +
             format_double(tr.accuracy, 8) + "\t" + format_double(tr.uar, 8) + "\n";
      confusions += "# task=" + task + " norm=" + norm_mode_name(mode) + "\n" +
                    format_confusion(tr.cm) + "\n";
      std::cout << task << "-class " << norm_mode_name(mode)
                << ": test accuracy = " << format_double(tr.accuracy, 6)
                << ", test UAR = " << format_double(tr.uar, 6)
                << " (C=" << format_double(gs.best_c, 8)
                << ", test evaluations: " << tr.test_evaluations << ")\n";
    }
  }
  write_file_atomic(out_path, out);
  if (!confusion_path.empty()) write_file_atomic(confusion_path, confusions);
  return 0;
}

int cmd_snr(const GlobalArgs& g, const std::string& manifest_path,
            const std::vector<std::string>& annotation_paths, const std::string& species,
            const std::string& out_path, const std::string& plot_path) {
  PipelineConfig cfg = effective_config(g);
  CorpusManifest manifest = read_manifest(manifest_path);
  std::vector<Annotation> annotations = read_annotation_files(annotation_paths, manifest);

  std::set<std::string> species_recs;
  for (const RecordingInfo& rec : manifest.recordings)
    if (rec.species == species) species_recs.insert(rec.source_id);

  ClipCache cache(manifest);
  std::vector<AudioClip> signal_store, background_store;
  for (const Annotation& a : annotations) {
    if (a.label == species)
      signal_store.push_back(slice_clip(cache.get(a.source_id), a.interval));
    else if (a.label == kBackgroundLabel && species_recs.count(a.source_id))
      background_store.push_back(slice_clip(cache.get(a.source_id), a.interval));
  }
  std::vector<const AudioClip*> signal, background;
  for (const AudioClip& c : signal_store) signal.push_back(&c);
  for (const AudioClip& c : background_store) background.push_back(&c);

  SnrProfile profile = snr_profile(signal, background, cfg.eval_max_hz, cfg.frame, cfg.db_mean);
  write_snr_csv(profile, out_path);
  if (!plot_path.empty()) write_snr_svg(profile, plot_path);
  std::cout << "snr profile for " << species << " over " << signal.size() << " signal / "
            << background.size() << " background chunks -> " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"voxkit: vocalisation detection, condensation and species classification"};
  app.set_version_flag("--version", std::string("voxkit ") + voxkit::kVersion);

  GlobalArgs g;
  std::uint64_t seed_arg = 0;
  int jobs_arg = 0;
  const char* env_config = std::getenv("VOXKIT_CONFIG");
  if (env_config) g.config_path = env_config;
  app.add_option("--config", g.config_path, "Pipeline config file (env VOXKIT_CONFIG)");
  auto* seed_opt = app.add_option("--seed", seed_arg, "Random seed (overrides config)");
  auto* jobs_opt = app.add_option("--jobs", jobs_arg, "Worker threads (overrides config)");
  app.add_flag("--print-config", g.print_config, "Print the effective config and exit");

  // gen-fixtures
  FixtureParams fx;
  std::string fx_out;
  auto* c_fx = app.add_subcommand("gen-fixtures", "Generate a synthetic fixture corpus");
  c_fx->add_option("--out", fx_out, "Output corpus directory")->required();
  c_fx->add_option("--sample-rate", fx.sample_rate, "Sample rate (Hz)");
  c_fx->add_option("--sessions", fx.sessions_per_species, "Sessions per species");
  c_fx->add_option("--recording-s", fx.recording_s, "Recording length (s)");
  c_fx->add_option("--calls-min", fx.calls_min, "Min calls per recording");
  c_fx->add_option("--calls-max", fx.calls_max, "Max calls per recording");
  c_fx->add_option("--snr-min", fx.snr_min_db, "Min per-call SNR (dB)");
  c_fx->add_option("--snr-max", fx.snr_max_db, "Max per-call SNR (dB)");

  // detect
  std::string d_manifest, d_out;
  std::vector<std::string> d_species;
  auto* c_detect = app.add_subcommand("detect", "Detect vocalisation events");
  c_detect->add_option("--manifest", d_manifest, "Corpus manifest")->required();
  c_detect->add_option("--species", d_species, "Species (default: all in the label set)");
  c_detect->add_option("--out", d_out, "Output events TSV")->required();

  // optimize-thresholds
  std::string o_manifest, o_species, o_seeds, o_out, o_out_config;
  auto* c_opt = app.add_subcommand("optimize-thresholds",
                                   "Grid-search detector thresholds against seed annotations");
  c_opt->add_option("--manifest", o_manifest, "Corpus manifest")->required();
  c_opt->add_option("--species", o_species, "Species to optimize")->required();
  c_opt->add_option("--seeds", o_seeds, "Seed annotations (selection table)")->required();
  c_opt->add_option("--out", o_out, "Output report TSV")->required();
  c_opt->add_option("--out-config", o_out_config,
                    "Also write the chosen thresholds as config overrides");

  // condense
  std::string cn_manifest, cn_events, cn_audio, cn_index;
  auto* c_cond = app.add_subcommand("condense", "Bundle detected events into a dense file");
  c_cond->add_option("--manifest", cn_manifest, "Corpus manifest")->required();
  c_cond->add_option("--events", cn_events, "Events TSV from detect")->required();
  c_cond->add_option("--out-audio", cn_audio, "Condensed WAVE output")->required();
  c_cond->add_option("--out-index", cn_index, "Condensed index TSV output")->required();

  // lift
  std::string l_manifest, l_index, l_annotations, l_out;
  auto* c_lift = app.add_subcommand("lift", "Map condensed-time annotations back to source time");
  c_lift->add_option("--manifest", l_manifest, "Corpus manifest")->required();
  c_lift->add_option("--index", l_index, "Condensed index TSV")->required();
  c_lift->add_option("--annotations", l_annotations, "Annotations on the condensed file")
      ->required();
  c_lift->add_option("--out", l_out, "Output selection table")->required();

  // extract-features
  std::string e_manifest, e_out, e_lld_dir;
  std::vector<std::string> e_annotations;
  auto* c_feat = app.add_subcommand("extract-features",
                                    "Extract 1140-dim suprasegmental features per chunk");
  c_feat->add_option("--manifest", e_manifest, "Corpus manifest")->required();
  c_feat->add_option("--annotations", e_annotations, "Selection table(s)")->required();
  c_feat->add_option("--out", e_out, "Output feature CSV")->required();
  c_feat->add_option("--dump-lld", e_lld_dir, "Also write per-chunk LLD CSVs here");

  // split
  std::string s_manifest, s_out;
  std::vector<std::string> s_annotations;
  auto* c_split = app.add_subcommand("split", "Chronological train/valid/test split");
  c_split->add_option("--manifest", s_manifest, "Corpus manifest")->required();
  c_split->add_option("--annotations", s_annotations, "Selection table(s)")->required();
  c_split->add_option("--out", s_out, "Output splits TSV")->required();

  // sample-background
  std::string b_manifest, b_out;
  std::vector<std::string> b_annotations;
  auto* c_bg = app.add_subcommand("sample-background",
                                  "Sample duration-matched background chunks");
  c_bg->add_option("--manifest", b_manifest, "Corpus manifest")->required();
  c_bg->add_option("--annotations", b_annotations, "Selection table(s)")->required();
  c_bg->add_option("--out", b_out, "Output selection table (background chunks)")->required();

  // train
  std::string t_manifest, t_splits, t_task = "four", t_norm, t_out;
  std::vector<std::string> t_features;
  double t_c = 1.0;
  auto* c_train = app.add_subcommand("train", "Train a kernel ELM on the train split");
  c_train->add_option("--manifest", t_manifest, "Corpus manifest")->required();
  c_train->add_option("--features", t_features, "Feature CSV(s)")->required();
  c_train->add_option("--splits", t_splits, "Splits TSV")->required();
  c_train->add_option("--task", t_task, "four | five (background as fifth class)");
  c_train->add_option("--c", t_c, "Regularization C")->required();
  c_train->add_option("--norm", t_norm, "zn | zn+l2 (default from config)");
  c_train->add_option("--out", t_out, "Output model file")->required();

  // grid-search
  std::string gs_manifest, gs_splits, gs_task = "four", gs_norm, gs_out;
  std::vector<std::string> gs_features;
  auto* c_gs = app.add_subcommand("grid-search", "Optimize C on the validation set by UAR");
  c_gs->add_option("--manifest", gs_manifest, "Corpus manifest")->required();
  c_gs->add_option("--features", gs_features, "Feature CSV(s)")->required();
  c_gs->add_option("--splits", gs_splits, "Splits TSV")->required();
  c_gs->add_option("--task", gs_task, "four | five");
  c_gs->add_option("--norm", gs_norm, "zn | zn+l2 (default from config)");
  c_gs->add_option("--out", gs_out, "Output report TSV")->required();

  // predict
  std::string p_model, p_out;
  std::vector<std::string> p_features;
  auto* c_pred = app.add_subcommand("predict", "Predict labels with a trained model");
  c_pred->add_option("--model", p_model, "Model file")->required();
  c_pred->add_option("--features", p_features, "Feature CSV(s)")->required();
  c_pred->add_option("--out", p_out, "Output predictions TSV")->required();

  // evaluate
  std::string ev_manifest, ev_splits, ev_task = "both", ev_norm = "both", ev_out, ev_confusion;
  std::vector<std::string> ev_features;
  auto* c_eval = app.add_subcommand("evaluate",
                                    "Full protocol: grid-search, refit on train+valid, one "
                                    "test probe per task/norm");
  c_eval->add_option("--manifest", ev_manifest, "Corpus manifest")->required();
  c_eval->add_option("--features", ev_features, "Feature CSV(s)")->required();
  c_eval->add_option("--splits", ev_splits, "Splits TSV")->required();
  c_eval->add_option("--task", ev_task, "four | five | both");
  c_eval->add_option("--norm", ev_norm, "zn | zn+l2 | both");
  c_eval->add_option("--out", ev_out, "Output report TSV")->required();
  c_eval->add_option("--confusion", ev_confusion, "Also write confusion matrices here");

  // snr
  std::string sn_manifest, sn_species, sn_out, sn_plot;
  std::vector<std::string> sn_annotations;
  auto* c_snr = app.add_subcommand("snr", "Signal vs background spectral profile");
  c_snr->add_option("--manifest", sn_manifest, "Corpus manifest")->required();
  c_snr->add_option("--annotations", sn_annotations,
                    "Selection table(s) with species and background chunks")
      ->required();
  c_snr->add_option("--species", sn_species, "Species to profile")->required();
  c_snr->add_option("--out", sn_out, "Output profile CSV")->required();
  c_snr->add_option("--plot", sn_plot, "Also write an SVG plot here");

  app.require_subcommand(0, 1);
  // Global options (--seed, --config, --jobs) are accepted after the
  // subcommand name as well.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (seed_opt->count()) g.seed = seed_arg;
  if (jobs_opt->count()) g.jobs = jobs_arg;

  PipelineConfig cfg_for_log;
  int status = 0;
  try {
    cfg_for_log = effective_config(g);
    if (g.print_config) {
      std::cout << print_config(cfg_for_log);
      return 0;
    }
    if (c_fx->parsed()) {
      fx.out_dir = fx_out;
      status = cmd_gen_fixtures(g, fx);
    } else if (c_detect->parsed()) {
      status = cmd_detect(g, d_manifest, d_species, d_out);
    } else if (c_opt->parsed()) {
      status = cmd_optimize_thresholds(g, o_manifest, o_species, o_seeds, o_out, o_out_config);
    } else if (c_cond->parsed()) {
      status = cmd_condense(g, cn_manifest, cn_events, cn_audio, cn_index);
    } else if (c_lift->parsed()) {
      status = cmd_lift(g, l_manifest, l_index, l_annotations, l_out);
    } else if (c_feat->parsed()) {
      status = cmd_extract_features(g, e_manifest, e_annotations, e_out, e_lld_dir);
    } else if (c_split->parsed()) {
      status = cmd_split(g, s_manifest, s_annotations, s_out);
    } else if (c_bg->parsed()) {
      status = cmd_sample_background(g, b_manifest, b_annotations, b_out);
    } else if (c_train->parsed()) {
      status = cmd_train(g, t_manifest, t_features, t_splits, t_task, t_c, t_norm, t_out);
    } else if (c_gs->parsed()) {
      status = cmd_grid_search(g, gs_manifest, gs_features, gs_splits, gs_task, gs_norm, gs_out);
    } else if (c_pred->parsed()) {
      status = cmd_predict(g, p_model, p_features, p_out);
    } else if (c_eval->parsed()) {
      status = cmd_evaluate(g, ev_manifest, ev_features, ev_splits, ev_task, ev_norm, ev_out,
                            ev_confusion);
    } else if (c_snr->parsed()) {
      status = cmd_snr(g, sn_manifest, sn_annotations, sn_species, sn_out, sn_plot);
    } else {
      std::cerr << app.help();
      return 2;
    }
  } catch (const voxkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = 1;
  }
  append_run_log(cfg_for_log, argc, argv, status);
  return status;
}
