// voxkit/experiment.hpp
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
// Hyper-parameter protocol: the regularization coefficient is optimized on
// the validation set by UAR; with the winner, normalization and model are
// refitted on train+valid and the test set is scored exactly once.

#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "voxkit/kelm.hpp"
#include "voxkit/metrics.hpp"

namespace voxkit {

enum class NormMode { kZn, kZnL2 };

inline const char* norm_mode_name(NormMode m) {
  return m == NormMode::kZn ? "zn" : "zn+l2";
}

// Default C grids: 10^{-6..1} under ZN, 10^{-1..6} under ZN+L2.
inline std::vector<double> default_c_grid(NormMode mode) {
  std::vector<double> grid;
  int lo = mode == NormMode::kZn ? -6 : -1;
  int hi = mode == NormMode::kZn ? 1 : 6;
  for (int e = lo; e <= hi; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

struct GridPointReport {
  double c = 0.0;
  double accuracy = 0.0;
  double uar = 0.0;
  std::size_t missing_classes = 0;  // classes absent from the validation set
};

struct GridSearchReport {
  std::vector<GridPointReport> points;
  double best_c = 0.0;
  double best_uar = 0.0;
  bool degenerate_valid_warning = false;
};

struct TestReport {
  double accuracy = 0.0;
  double uar = 0.0;
  ConfusionMatrix cm;
  double c = 0.0;
  NormMode mode = NormMode::kZn;
  std::size_t test_evaluations = 0;  // always exactly 1
};

namespace experiment_detail {

inline std::vector<std::string> labels_of(const std::vector<FeatureVector>& set) {
  std::vector<std::string> out;
  out.reserve(set.size());
  for (const FeatureVector& fv : set) out.push_back(fv.label);
  return out;
}

inline void require_disjoint(const std::vector<FeatureVector>& a,
                             const std::vector<FeatureVector>& b, const char* what) {
  auto key = [](const FeatureVector& fv) {
    return fv.chunk_ref.source_id + "@" + format_double(fv.chunk_ref.interval.begin_s) +
           ":" + format_double(fv.chunk_ref.interval.end_s);
  };
  std::set<std::string> seen;
  for (const FeatureVector& fv : a) seen.insert(key(fv));
  for (const FeatureVector& fv : b) {
    if (seen.count(key(fv)))
      throw ProtocolError(std::string("chunk sets overlap (") + what + "): " + key(fv));
  }
}

inline ConfusionMatrix score(const KelmModel& model, const std::vector<FeatureVector>& set,
                             const std::vector<std::string>& label_order) {
  Eigen::MatrixXd x = to_matrix(set, model.norm);
  std::vector<Prediction> preds = predict_batch(model, x);
  std::vector<std::string> pred_labels;
  pred_labels.reserve(preds.size());
  for (const Prediction& p : preds) pred_labels.push_back(p.label);
  return confusion(labels_of(set), pred_labels, label_order);
}

}  // namespace experiment_detail

// Trains one model per grid C on the training set and scores validation UAR;
// the best UAR wins, ties go to the smaller C.
inline GridSearchReport grid_search(const std::vector<FeatureVector>& train,
                                    const std::vector<FeatureVector>& valid,
                                    std::vector<double> c_grid, NormMode mode,
                                    const std::vector<std::string>& label_order) {
  if (c_grid.empty()) c_grid = default_c_grid(mode);
  std::sort(c_grid.begin(), c_grid.end());
  c_grid.erase(std::unique(c_grid.begin(), c_grid.end()), c_grid.end());
  for (double c : c_grid)
    if (!(c > 0.0)) throw ConfigError("grid_search: C values must be positive");
  experiment_detail::require_disjoint(train, valid, "train/valid");

  NormStats norm = fit_norm(train, mode == NormMode::kZnL2);
  Eigen::MatrixXd x_train = to_matrix(train, norm);
  std::vector<std::string> train_labels = experiment_detail::labels_of(train);

  GridSearchReport report;
  bool have_best = false;
  for (double c : c_grid) {
    KelmModel model = train_kelm(x_train, train_labels, label_order, c, norm);
    ConfusionMatrix cm = experiment_detail::score(model, valid, label_order);
    UarOverPresent u = uar_over_present(cm);

    GridPointReport point;
    point.c = c;
    point.accuracy = accuracy(cm);
    point.uar = u.value;
    point.missing_classes = u.missing_classes;
    if (u.missing_classes > 0) report.degenerate_valid_warning = true;
    report.points.push_back(point);

    if (!have_best || point.uar > report.best_uar) {
      report.best_uar = point.uar;
      report.best_c = c;
      have_best = true;
    }
  }
  return report;
}

// Refits normalization and model on train+valid with the chosen C and probes
// the test set exactly once.
inline TestReport refit_and_test(const std::vector<FeatureVector>& train,
                                 const std::vector<FeatureVector>& valid,
                                 const std::vector<FeatureVector>& test, double best_c,
                                 NormMode mode, const std::vector<std::string>& label_order) {
  experiment_detail::require_disjoint(train, valid, "train/valid");
  experiment_detail::require_disjoint(train, test, "train/test");
  experiment_detail::require_disjoint(valid, test, "valid/test");
  if (test.empty()) throw ProtocolError("refit_and_test: empty test set");

  std::vector<FeatureVector> combined = train;
  combined.insert(combined.end(), valid.begin(), valid.end());
  NormStats norm = fit_norm(combined, mode == NormMode::kZnL2);
  Eigen::MatrixXd x = to_matrix(combined, norm);
  KelmModel model =
      train_kelm(x, experiment_detail::labels_of(combined), label_order, best_c, norm);

  TestReport report;
  report.cm = experiment_detail::score(model, test, label_order);
  report.accuracy = accuracy(report.cm);
  report.uar = uar_over_present(report.cm).value;
  report.c = best_c;
  report.mode = mode;
  report.test_evaluations = 1;
  return report;
}

// Same, but also returns the refitted model (for persistence).
inline std::pair<TestReport, KelmModel> refit_and_test_with_model(
    const std::vector<FeatureVector>& train, const std::vector<FeatureVector>& valid,
    const std::vector<FeatureVector>& test, double best_c, NormMode mode,
    const std::vector<std::string>& label_order) {
  TestReport report = refit_and_test(train, valid, test, best_c, mode, label_order);
  std::vector<FeatureVector> combined = train;
  combined.insert(combined.end(), valid.begin(), valid.end());
  NormStats norm = fit_norm(combined, mode == NormMode::kZnL2);
  Eigen::MatrixXd x = to_matrix(combined, norm);
  KelmModel model =
      train_kelm(x, experiment_detail::labels_of(combined), label_order, best_c, norm);
  return {report, std::move(model)};
}

}  // namespace voxkit
