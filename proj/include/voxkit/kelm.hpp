// voxkit/kelm.hpp
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
// Kernel extreme learning machine with a linear kernel: training solves
// (I/C + K) beta = T by SPD factorization (never an explicit inverse), where
// K is the train Gram matrix and T encodes classes as +1/-1 per column.
// Prediction scores a sample by k(x, train) * beta and takes the argmax.
//
// Normalization: per-feature z-scores fitted on training data (population
// divisor), optionally followed by feature-vector L2 scaling, which turns
// the linear kernel into a cosine similarity.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "voxkit/core.hpp"
#include "voxkit/functionals.hpp"

namespace voxkit {

struct NormStats {
  std::vector<double> mean;
  std::vector<double> std_dev;
  std::vector<std::uint8_t> zero_std;  // flagged degenerate features
  bool apply_l2 = false;

  std::size_t dims() const { return mean.size(); }
};

inline NormStats fit_norm(const std::vector<FeatureVector>& train, bool apply_l2) {
  if (train.size() < 2)
    throw PreconditionError("fit_norm: need at least 2 training vectors");
  const std::size_t d = train.front().values.size();
  NormStats stats;
  stats.apply_l2 = apply_l2;
  stats.mean.assign(d, 0.0);
  stats.std_dev.assign(d, 0.0);
  stats.zero_std.assign(d, 0);

  for (const FeatureVector& fv : train) {
    if (fv.values.size() != d) throw PreconditionError("fit_norm: inconsistent dimensions");
    for (std::size_t i = 0; i < d; ++i) stats.mean[i] += fv.values[i];
  }
  for (double& m : stats.mean) m /= static_cast<double>(train.size());
  for (const FeatureVector& fv : train) {
    for (std::size_t i = 0; i < d; ++i) {
      double dv = fv.values[i] - stats.mean[i];
      stats.std_dev[i] += dv * dv;
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    stats.std_dev[i] = std::sqrt(stats.std_dev[i] / static_cast<double>(train.size()));
    if (stats.std_dev[i] == 0.0) stats.zero_std[i] = 1;
  }
  return stats;
}

// z = (x - mean)/std per feature (zero-std features map to 0), then unit L2
// when enabled and the vector is nonzero.
inline std::vector<double> apply_norm(const std::vector<double>& x, const NormStats& stats) {
  if (x.size() != stats.dims())
    throw PreconditionError("apply_norm: dimension mismatch (" + std::to_string(x.size()) +
                            " vs " + std::to_string(stats.dims()) + ")");
  std::vector<double> z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    z[i] = stats.zero_std[i] ? 0.0 : (x[i] - stats.mean[i]) / stats.std_dev[i];
  if (stats.apply_l2) {
    double norm = 0.0;
    for (double v : z) norm += v * v;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& v : z) v /= norm;
  }
  return z;
}

inline Eigen::MatrixXd to_matrix(const std::vector<FeatureVector>& features,
                                 const NormStats& stats) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()),
                    static_cast<Eigen::Index>(stats.dims()));
  for (std::size_t r = 0; r < features.size(); ++r) {
    std::vector<double> z = apply_norm(features[r].values, stats);
    for (std::size_t c = 0; c < z.size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = z[c];
  }
  return m;
}

// Linear-kernel Gram matrix K[i][j] = <A_i, B_j>.
inline Eigen::MatrixXd gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols())
    throw PreconditionError("gram: dimension mismatch (" + std::to_string(a.cols()) +
                            " vs " + std::to_string(b.cols()) + ")");
  return a * b.transpose();
}

struct KelmModel {
  Eigen::MatrixXd train_matrix;  // N x d, normalized
  Eigen::MatrixXd beta;          // N x L
  double regularization_c = 1.0;
  NormStats norm;
  std::vector<std::string> labels;
};

namespace kelm_detail {

inline Eigen::MatrixXd target_matrix(const std::vector<std::string>& row_labels,
                                     const std::vector<std::string>& label_order) {
  Eigen::MatrixXd t(static_cast<Eigen::Index>(row_labels.size()),
                    static_cast<Eigen::Index>(label_order.size()));
  t.setConstant(-1.0);
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    bool found = false;
    for (std::size_t l = 0; l < label_order.size(); ++l) {
      if (label_order[l] == row_labels[i]) {
        t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l)) = 1.0;
        found = true;
        break;
      }
    }
    if (!found)
      throw ReferenceError("train_kelm: label '" + row_labels[i] + "' not in label order");
  }
  return t;
}

}  // namespace kelm_detail

inline constexpr double kSolveResidualTolerance = 1e-8;

// Trains on an already-normalized matrix. Solves (I/C + K) beta = T via
// Cholesky with one jitter retry (1e-10 * trace(K)/N on the diagonal); the
// residual against the unjittered system must stay within
// 1e-8 * max(1, |T|_inf) or training fails.
inline KelmModel train_kelm(const Eigen::MatrixXd& train, const std::vector<std::string>& row_labels,
                            const std::vector<std::string>& label_order, double regularization_c,
                            NormStats norm = {}) {
  const Eigen::Index n = train.rows();
  if (static_cast<std::size_t>(n) != row_labels.size())
    throw PreconditionError("train_kelm: row/label count mismatch");
  if (label_order.size() < 2)
    throw PreconditionError("train_kelm: need at least 2 classes");
  if (n < static_cast<Eigen::Index>(label_order.size()))
    throw PreconditionError("train_kelm: need at least as many rows as classes");
  if (!(regularization_c > 0.0))
    throw PreconditionError("train_kelm: regularization C must be positive");

  Eigen::MatrixXd k = gram(train, train);
  Eigen::MatrixXd t = kelm_detail::target_matrix(row_labels, label_order);
  Eigen::MatrixXd system = k;
  system.diagonal().array() += 1.0 / regularization_c;

  Eigen::MatrixXd beta;
  double t_scale = std::max(1.0, t.cwiseAbs().maxCoeff());
  // The attainable residual floor in double precision is on the order of
  // eps * |A| * |beta|; for ill-conditioned Grams at large C this exceeds any
  // fixed absolute bound, so the check is floor-aware.
  double a_norm = system.cwiseAbs().rowwise().sum().maxCoeff();
  auto residual_bound = [&] {
    double floor = 64.0 * std::numeric_limits<double>::epsilon() * a_norm *
                   std::max(1.0, beta.cwiseAbs().maxCoeff());
    return kSolveResidualTolerance * t_scale + floor;
  };
  auto solve_refined = [&](const Eigen::LLT<Eigen::MatrixXd>& f) {
    // Iterative refinement against the unjittered system pulls the residual
    // down to the rounding floor.
    beta = f.solve(t);
    for (int step = 0; step < 4; ++step) {
      Eigen::MatrixXd residual = t - system * beta;
      if (residual.cwiseAbs().maxCoeff() <= residual_bound()) break;
      beta += f.solve(residual);
    }
  };

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  if (llt.info() == Eigen::Success) {
    solve_refined(llt);
  } else {
    double jitter = 1e-10 * k.trace() / static_cast<double>(n);
    Eigen::MatrixXd retry = system;
    retry.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt2(retry);
    if (llt2.info() != Eigen::Success)
      throw NumericError("train_kelm: factorization of I/C + K failed twice; "
                         "consider a larger 1/C (smaller C = " +
                         format_double(regularization_c) + ")");
    solve_refined(llt2);
  }

  double residual = (system * beta - t).cwiseAbs().maxCoeff();
  if (!(residual <= residual_bound()))
    throw NumericError("train_kelm: solve residual " + format_double(residual) +
                       " exceeds bound " + format_double(residual_bound()));

  KelmModel model;
  model.train_matrix = train;
  model.beta = std::move(beta);
  model.regularization_c = regularization_c;
  model.norm = std::move(norm);
  model.labels = label_order;
  return model;
}

struct Prediction {
  std::vector<double> scores;  // one per class, label order
  std::string label;           // argmax, first index on ties
  std::size_t label_index = 0;
};

// x must already be normalized with model.norm.
inline Prediction predict(const KelmModel& model, const std::vector<double>& x) {
  if (static_cast<Eigen::Index>(x.size()) != model.train_matrix.cols())
    throw PreconditionError("predict: dimension mismatch (" + std::to_string(x.size()) +
                            " vs " + std::to_string(model.train_matrix.cols()) + ")");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::RowVectorXd scores = (model.train_matrix * xv).transpose() * model.beta;

  Prediction p;
  p.scores.assign(scores.data(), scores.data() + scores.size());
  p.label_index = 0;
  for (std::size_t i = 1; i < p.scores.size(); ++i)
    if (p.scores[i] > p.scores[p.label_index]) p.label_index = i;
  p.label = model.labels[p.label_index];
  return p;
}

// Applies the model's normalization first.
inline Prediction predict_raw(const KelmModel& model, const std::vector<double>& x) {
  return predict(model, apply_norm(x, model.norm));
}

inline std::vector<Prediction> predict_batch(const KelmModel& model,
                                             const Eigen::MatrixXd& x_normalized) {
  Eigen::MatrixXd scores = gram(x_normalized, model.train_matrix) * model.beta;
  std::vector<Prediction> out(static_cast<std::size_t>(x_normalized.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Prediction& p = out[static_cast<std::size_t>(r)];
    p.scores.resize(static_cast<std::size_t>(scores.cols()));
    for (Eigen::Index c = 0; c < scores.cols(); ++c)
      p.scores[static_cast<std::size_t>(c)] = scores(r, c);
    p.label_index = 0;
    for (std::size_t i = 1; i < p.scores.size(); ++i)
      if (p.scores[i] > p.scores[p.label_index]) p.label_index = i;
    p.label = model.labels[p.label_index];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model persistence: versioned little-endian binary, documented byte-exactly
// in docs/formats.md.

namespace kelm_detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}
inline void put_f64(std::string& out, double v) {
  char b[8];
  std::memcpy(b, &v, 8);
  out.append(b, 8);
}
inline std::uint32_t get_u32(const std::string& s, std::size_t& pos) {
  if (pos + 4 > s.size()) throw FormatError("model file truncated");
  std::uint32_t v;
  std::memcpy(&v, s.data() + pos, 4);
  pos += 4;
  return v;
}
inline double get_f64(const std::string& s, std::size_t& pos) {
  if (pos + 8 > s.size()) throw FormatError("model file truncated");
  double v;
  std::memcpy(&v, s.data() + pos, 8);
  pos += 8;
  return v;
}

}  // namespace kelm_detail

inline constexpr std::uint32_t kModelFormatVersion = 1;

inline void save_model(const KelmModel& model, const std::string& path) {
  using namespace kelm_detail;
  std::string out = "VXKM";
  put_u32(out, kModelFormatVersion);
  put_u32(out, static_cast<std::uint32_t>(model.labels.size()));
  for (const std::string& l : model.labels) {
    put_u32(out, static_cast<std::uint32_t>(l.size()));
    out += l;
  }
  put_f64(out, model.regularization_c);
  out.push_back(model.norm.apply_l2 ? 1 : 0);
  put_u32(out, static_cast<std::uint32_t>(model.norm.dims()));
  for (double v : model.norm.mean) put_f64(out, v);
  for (double v : model.norm.std_dev) put_f64(out, v);
  put_u32(out, static_cast<std::uint32_t>(model.train_matrix.rows()));
  for (Eigen::Index r = 0; r < model.train_matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < model.train_matrix.cols(); ++c)
      put_f64(out, model.train_matrix(r, c));
  for (Eigen::Index r = 0; r < model.beta.rows(); ++r)
    for (Eigen::Index c = 0; c < model.beta.cols(); ++c)
      put_f64(out, model.beta(r, c));
  write_file_atomic(path, out);
}

inline KelmModel load_model(const std::string& path) {
  using namespace kelm_detail;
  std::string s = read_text_file(path);
  if (s.size() < 8 || s.compare(0, 4, "VXKM") != 0)
    throw FormatError("not a voxkit model file: " + path);
  std::size_t pos = 4;
  std::uint32_t version = get_u32(s, pos);
  if (version != kModelFormatVersion)
    throw UnsupportedError("unsupported model format version " + std::to_string(version) +
                           ": " + path);
  KelmModel model;
  std::uint32_t n_labels = get_u32(s, pos);
  for (std::uint32_t i = 0; i < n_labels; ++i) {
    std::uint32_t len = get_u32(s, pos);
    if (pos + len > s.size()) throw FormatError("model file truncated: " + path);
    model.labels.emplace_back(s.data() + pos, len);
    pos += len;
  }
  model.regularization_c = get_f64(s, pos);
  if (pos + 1 > s.size()) throw FormatError("model file truncated: " + path);
  model.norm.apply_l2 = s[pos++] != 0;
  std::uint32_t dim = get_u32(s, pos);
  model.norm.mean.resize(dim);
  model.norm.std_dev.resize(dim);
  model.norm.zero_std.resize(dim);
  for (std::uint32_t i = 0; i < dim; ++i) model.norm.mean[i] = get_f64(s, pos);
  for (std::uint32_t i = 0; i < dim; ++i) {
    model.norm.std_dev[i] = get_f64(s, pos);
    model.norm.zero_std[i] = model.norm.std_dev[i] == 0.0 ? 1 : 0;
  }
  std::uint32_t n = get_u32(s, pos);
  model.train_matrix.resize(n, dim);
  for (std::uint32_t r = 0; r < n; ++r)
    for (std::uint32_t c = 0; c < dim; ++c) model.train_matrix(r, c) = get_f64(s, pos);
  model.beta.resize(n, n_labels);
  for (std::uint32_t r = 0; r < n; ++r)
    for (std::uint32_t c = 0; c < n_labels; ++c) model.beta(r, c) = get_f64(s, pos);
  if (pos != s.size()) throw FormatError("trailing bytes in model file: " + path);
  return model;
}

}  // namespace voxkit
