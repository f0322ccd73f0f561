// voxkit/metrics.hpp
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

#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/tsv.hpp"

namespace voxkit {

// Rows = truth, columns = prediction, fixed label order.
struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<long long>> counts;

  long long total() const {
    long long t = 0;
    for (const auto& row : counts)
      for (long long v : row) t += v;
    return t;
  }
  long long row_sum(std::size_t i) const {
    long long t = 0;
    for (long long v : counts[i]) t += v;
    return t;
  }
};

inline ConfusionMatrix confusion(const std::vector<std::string>& truth,
                                 const std::vector<std::string>& pred,
                                 const std::vector<std::string>& label_order) {
  if (truth.size() != pred.size())
    throw PreconditionError("confusion: truth and prediction lengths differ");
  ConfusionMatrix cm;
  cm.labels = label_order;
  cm.counts.assign(label_order.size(), std::vector<long long>(label_order.size(), 0));
  auto index_of = [&](const std::string& l) {
    for (std::size_t i = 0; i < label_order.size(); ++i)
      if (label_order[i] == l) return i;
    throw ReferenceError("confusion: unknown label '" + l + "'");
  };
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++cm.counts[index_of(truth[i])][index_of(pred[i])];
  return cm;
}

// Unweighted average recall: mean over classes of diagonal/row-sum. Every
// class must have support.
inline double uar(const ConfusionMatrix& cm) {
  if (cm.labels.empty()) throw PreconditionError("uar: empty confusion matrix");
  double acc = 0.0;
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    long long support = cm.row_sum(i);
    if (support == 0)
      throw PreconditionError("uar: class '" + cm.labels[i] + "' has no instances");
    acc += static_cast<double>(cm.counts[i][i]) / static_cast<double>(support);
  }
  return acc / static_cast<double>(cm.labels.size());
}

// UAR over classes that actually appear; used by validation scoring where a
// degenerate split may miss classes entirely. missing > 0 is a warning, not
// an error.
struct UarOverPresent {
  double value = 0.0;
  std::size_t missing_classes = 0;
};

inline UarOverPresent uar_over_present(const ConfusionMatrix& cm) {
  UarOverPresent r;
  double acc = 0.0;
  std::size_t present = 0;
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    long long support = cm.row_sum(i);
    if (support == 0) {
      ++r.missing_classes;
      continue;
    }
    acc += static_cast<double>(cm.counts[i][i]) / static_cast<double>(support);
    ++present;
  }
  if (present == 0) throw PreconditionError("uar: no class has any instances");
  r.value = acc / static_cast<double>(present);
  return r;
}

inline double accuracy(const ConfusionMatrix& cm) {
  long long total = cm.total();
  if (total == 0) throw PreconditionError("accuracy: empty confusion matrix");
  long long diag = 0;
  for (std::size_t i = 0; i < cm.labels.size(); ++i) diag += cm.counts[i][i];
  return static_cast<double>(diag) / static_cast<double>(total);
}

inline std::string format_confusion(const ConfusionMatrix& cm) {
  std::string out = "truth\\pred";
  for (const auto& l : cm.labels) out += "\t" + l;
  out += "\n";
  for (std::size_t i = 0; i < cm.labels.size(); ++i) {
    out += cm.labels[i];
    for (std::size_t j = 0; j < cm.labels.size(); ++j)
      out += "\t" + std::to_string(cm.counts[i][j]);
    out += "\n";
  }
  return out;
}

}  // namespace voxkit
