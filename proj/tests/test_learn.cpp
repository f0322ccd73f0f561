// tests/test_learn.cpp — normalization, Gram, kernel ELM training and
// prediction, grid search, refit protocol, model persistence.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "voxkit/experiment.hpp"
#include "voxkit/kelm.hpp"

using namespace voxkit;

namespace {

FeatureVector fv(std::vector<double> values, const std::string& label = "",
                 const std::string& source = "r", double begin = 0.0) {
  FeatureVector f;
  f.values = std::move(values);
  f.label = label;
  f.chunk_ref = {source, {begin, begin + 1.0}};
  return f;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d,
                              double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  Eigen::MatrixXd m(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = dist(rng);
  return m;
}

std::vector<std::string> cycle_labels(const std::vector<std::string>& order, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(order[i % order.size()]);
  return out;
}

// Distinct gaussian blobs per class, linearly separable by a wide margin.
std::vector<FeatureVector> blob_data(std::mt19937_64& rng, const std::vector<std::string>& classes,
                                     std::size_t per_class, std::size_t dims, double spread,
                                     const std::string& source_prefix) {
  std::normal_distribution<double> noise(0.0, spread);
  std::vector<FeatureVector> out;
  double t = 0.0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> v(dims, 0.0);
      for (std::size_t k = 0; k < dims; ++k) v[k] = noise(rng);
      v[c % dims] += 10.0;
      out.push_back(fv(std::move(v), classes[c], source_prefix, t));
      t += 2.0;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("fit_norm: mean 1, std 1 for the two-point set") {
  std::vector<FeatureVector> train = {fv(std::vector<double>(4, 0.0)),
                                      fv(std::vector<double>(4, 2.0))};
  NormStats stats = fit_norm(train, false);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(stats.mean[i] == 1.0);
    REQUIRE(stats.std_dev[i] == 1.0);  // population divisor
    REQUIRE(stats.zero_std[i] == 0);
  }
}

TEST_CASE("fit_norm: constant feature is flagged and maps to zero") {
  std::vector<FeatureVector> train = {fv({1.0, 5.0}), fv({2.0, 5.0}), fv({3.0, 5.0})};
  NormStats stats = fit_norm(train, false);
  REQUIRE(stats.zero_std[1] == 1);
  std::vector<double> z = apply_norm({9.0, 123.0}, stats);
  REQUIRE(z[1] == 0.0);
  REQUIRE(std::isfinite(z[0]));
}

TEST_CASE("fit_norm: stats come from training data only") {
  std::mt19937_64 rng(211);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<FeatureVector> train;
  for (int i = 0; i < 10; ++i) {
    std::vector<double> v(6);
    for (double& x : v) x = dist(rng);
    train.push_back(fv(std::move(v)));
  }
  NormStats before = fit_norm(train, true);

  // Score wildly different "test" data; stats must be unaffected, and a test
  // point equal to the training mean must map to exactly zero.
  std::vector<double> far(6, 1e6);
  apply_norm(far, before);
  NormStats after = fit_norm(train, true);
  REQUIRE(before.mean == after.mean);
  REQUIRE(before.std_dev == after.std_dev);
  std::vector<double> z = apply_norm(before.mean, before);
  for (double v : z) REQUIRE(v == 0.0);  // and stays zero under the L2 guard
}

TEST_CASE("apply_norm: ZN+L2 gives unit vectors and cosine kernels") {
  std::mt19937_64 rng(223);
  std::normal_distribution<double> dist(0.0, 2.0);
  std::vector<FeatureVector> train;
  for (int i = 0; i < 12; ++i) {
    std::vector<double> v(8);
    for (double& x : v) x = dist(rng);
    train.push_back(fv(std::move(v)));
  }
  NormStats zn = fit_norm(train, false);
  NormStats znl2 = fit_norm(train, true);

  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(8), b(8);
    for (double& x : a) x = dist(rng);
    for (double& x : b) x = dist(rng);

    std::vector<double> a2 = apply_norm(a, znl2), b2 = apply_norm(b, znl2);
    double norm_a = 0.0;
    for (double v : a2) norm_a += v * v;
    REQUIRE(std::sqrt(norm_a) == Catch::Approx(1.0).margin(1e-12));

    // Linear kernel on ZN+L2 vectors == cosine similarity of ZN vectors.
    std::vector<double> az = apply_norm(a, zn), bz = apply_norm(b, zn);
    double dot = 0.0, na = 0.0, nb = 0.0, dot2 = 0.0;
    for (std::size_t i = 0; i < 8; ++i) {
      dot += az[i] * bz[i];
      na += az[i] * az[i];
      nb += bz[i] * bz[i];
      dot2 += a2[i] * b2[i];
    }
    double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
    REQUIRE(std::abs(dot2 - cosine) <= 1e-12);
    REQUIRE(dot2 >= -1.0 - 1e-12);
    REQUIRE(dot2 <= 1.0 + 1e-12);
  }
}

TEST_CASE("gram: identity, symmetry, brute force") {
  Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(4, 4);
  REQUIRE(gram(eye, eye).isApprox(Eigen::MatrixXd::Identity(4, 4)));

  std::mt19937_64 rng(227);
  Eigen::MatrixXd a = random_matrix(rng, 5, 3);
  Eigen::MatrixXd b = random_matrix(rng, 7, 3);
  Eigen::MatrixXd k = gram(a, b);
  REQUIRE(k.rows() == 5);
  REQUIRE(k.cols() == 7);
  REQUIRE(gram(b, a).isApprox(k.transpose(), 1e-14));

  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 7; ++j) {
      double acc = 0.0;
      for (Eigen::Index d = 0; d < 3; ++d) acc += a(i, d) * b(j, d);
      REQUIRE(std::abs(k(i, j) - acc) <= 1e-12);
    }

  Eigen::MatrixXd wrong = random_matrix(rng, 2, 4);
  REQUIRE_THROWS_AS(gram(a, wrong), PreconditionError);
}

TEST_CASE("train_kelm: orthonormal rows reduce to a diagonal solve") {
  const std::vector<std::string> order = {"a", "b", "c", "d"};
  Eigen::MatrixXd train = Eigen::MatrixXd::Identity(4, 4);
  std::vector<std::string> labels = {"a", "b", "c", "d"};
  const double c_reg = 1e6;
  KelmModel model = train_kelm(train, labels, order, c_reg);

  // (I/C + I) beta = T  =>  beta = T / (1 + 1/C).
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      double t = i == j ? 1.0 : -1.0;
      REQUIRE(model.beta(i, j) == Catch::Approx(t / (1.0 + 1e-6)).margin(1e-9));
    }
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> row(4, 0.0);
    row[i] = 1.0;
    REQUIRE(predict(model, row).label == order[i]);
  }
}

TEST_CASE("train_kelm: matches the explicit-inverse oracle") {
  std::mt19937_64 rng(229);
  const std::vector<std::string> order = {"p", "q", "r", "s", "t"};
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd x = random_matrix(rng, 20, 6);
    std::vector<std::string> labels = cycle_labels(order, 20);
    double c_reg = std::pow(10.0, -2.0 + trial);
    KelmModel model = train_kelm(x, labels, order, c_reg);

    // Oracle: Gauss-Jordan inverse of (I/C + K), times T.
    std::vector<std::vector<double>> system(20, std::vector<double>(20, 0.0));
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        double acc = 0.0;
        for (int d = 0; d < 6; ++d) acc += x(i, d) * x(j, d);
        system[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            acc + (i == j ? 1.0 / c_reg : 0.0);
      }
    auto inv = oracles::gauss_jordan_inverse(system);
    std::vector<std::vector<double>> target(20, std::vector<double>(5, -1.0));
    for (int i = 0; i < 20; ++i)
      target[static_cast<std::size_t>(i)][static_cast<std::size_t>(i % 5)] = 1.0;
    auto beta = oracles::mat_mul(inv, target);

    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 5; ++j)
        REQUIRE(std::abs(model.beta(i, j) -
                         beta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) <= 1e-8);
  }
}

TEST_CASE("train_kelm: kernel solution equals primal ridge regression") {
  // Push-through identity: X^T (X X^T + lambda I)^-1 = (X^T X + lambda I)^-1 X^T.
  std::mt19937_64 rng(233);
  const std::vector<std::string> order = {"u", "v", "w", "x"};
  Eigen::MatrixXd x = random_matrix(rng, 30, 8);
  std::vector<std::string> labels = cycle_labels(order, 30);
  const double c_reg = 10.0;
  KelmModel model = train_kelm(x, labels, order, c_reg);

  // Primal oracle via Gauss-Jordan on the 8x8 system.
  std::vector<std::vector<double>> xtx(8, std::vector<double>(8, 0.0));
  for (int a = 0; a < 8; ++a)
    for (int b = 0; b < 8; ++b) {
      double acc = 0.0;
      for (int i = 0; i < 30; ++i) acc += x(i, a) * x(i, b);
      xtx[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          acc + (a == b ? 1.0 / c_reg : 0.0);
    }
  std::vector<std::vector<double>> xtt(8, std::vector<double>(4, 0.0));
  for (int a = 0; a < 8; ++a)
    for (int j = 0; j < 4; ++j) {
      double acc = 0.0;
      for (int i = 0; i < 30; ++i) {
        double t = (static_cast<int>(i % 4) == j) ? 1.0 : -1.0;
        acc += x(i, a) * t;
      }
      xtt[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)] = acc;
    }
  auto weights = oracles::mat_mul(oracles::gauss_jordan_inverse(xtx), xtt);

  std::normal_distribution<double> dist(0.0, 1.0);
  for (int probe = 0; probe < 20; ++probe) {
    std::vector<double> q(8);
    for (double& v : q) v = dist(rng);
    Prediction p = predict(model, q);
    for (int j = 0; j < 4; ++j) {
      double primal = 0.0;
      for (int a = 0; a < 8; ++a)
        primal += q[static_cast<std::size_t>(a)] *
                  weights[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)];
      REQUIRE(std::abs(p.scores[static_cast<std::size_t>(j)] - primal) <= 1e-6);
    }
  }
}

TEST_CASE("train_kelm: preconditions") {
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(3, 3);
  REQUIRE_THROWS_AS(train_kelm(x, {"a", "b", "a"}, {"a", "b"}, 0.0), PreconditionError);
  REQUIRE_THROWS_AS(train_kelm(x, {"a", "b"}, {"a", "b"}, 1.0), PreconditionError);
  REQUIRE_THROWS_AS(train_kelm(x, {"a", "b", "z"}, {"a", "b"}, 1.0), ReferenceError);
}

TEST_CASE("predict: zero-padding features does not change scores") {
  std::mt19937_64 rng(239);
  const std::vector<std::string> order = {"a", "b"};
  Eigen::MatrixXd x = random_matrix(rng, 10, 5);
  std::vector<std::string> labels = cycle_labels(order, 10);
  KelmModel narrow = train_kelm(x, labels, order, 1.0);

  Eigen::MatrixXd padded(10, 6);
  padded << x, Eigen::VectorXd::Zero(10);
  KelmModel wide = train_kelm(padded, labels, order, 1.0);

  std::normal_distribution<double> dist(0.0, 1.0);
  for (int probe = 0; probe < 20; ++probe) {
    std::vector<double> q(5);
    for (double& v : q) v = dist(rng);
    std::vector<double> q6 = q;
    q6.push_back(0.0);
    Prediction a = predict(narrow, q);
    Prediction b = predict(wide, q6);
    for (std::size_t j = 0; j < 2; ++j)
      REQUIRE(a.scores[j] == Catch::Approx(b.scores[j]).margin(1e-9));
  }
}

TEST_CASE("predict: batch equals per-item") {
  std::mt19937_64 rng(241);
  const std::vector<std::string> order = {"a", "b", "c"};
  Eigen::MatrixXd x = random_matrix(rng, 15, 7);
  KelmModel model = train_kelm(x, cycle_labels(order, 15), order, 5.0);

  Eigen::MatrixXd queries = random_matrix(rng, 50, 7);
  std::vector<Prediction> batch = predict_batch(model, queries);
  for (Eigen::Index i = 0; i < 50; ++i) {
    std::vector<double> q(7);
    for (Eigen::Index d = 0; d < 7; ++d) q[static_cast<std::size_t>(d)] = queries(i, d);
    Prediction single = predict(model, q);
    REQUIRE(single.label == batch[static_cast<std::size_t>(i)].label);
    for (std::size_t j = 0; j < 3; ++j)
      REQUIRE(single.scores[j] ==
              Catch::Approx(batch[static_cast<std::size_t>(i)].scores[j]).margin(1e-12));
  }
}

TEST_CASE("predict: argmax is invariant under a shared score offset") {
  std::mt19937_64 rng(251);
  const std::vector<std::string> order = {"a", "b", "c"};
  Eigen::MatrixXd x = random_matrix(rng, 12, 5);
  KelmModel model = train_kelm(x, cycle_labels(order, 12), order, 2.0);

  // beta' = beta + u * 1^T adds the same value to every class score.
  KelmModel shifted = model;
  Eigen::VectorXd u = Eigen::VectorXd::Random(12);
  shifted.beta = model.beta + u * Eigen::RowVectorXd::Ones(3);

  std::normal_distribution<double> dist(0.0, 1.0);
  for (int probe = 0; probe < 30; ++probe) {
    std::vector<double> q(5);
    for (double& v : q) v = dist(rng);
    REQUIRE(predict(model, q).label == predict(shifted, q).label);
  }
}

TEST_CASE("train_kelm: large C drives training predictions to the targets") {
  std::mt19937_64 rng(257);
  const std::vector<std::string> order = {"a", "b", "c", "d"};
  std::vector<FeatureVector> data = blob_data(rng, order, 6, 12, 0.3, "train");
  NormStats norm = fit_norm(data, false);
  Eigen::MatrixXd x = to_matrix(data, norm);
  std::vector<std::string> labels;
  for (const FeatureVector& f : data) labels.push_back(f.label);
  KelmModel model = train_kelm(x, labels, order, 1e6, norm);
  std::vector<Prediction> preds = predict_batch(model, x);
  for (std::size_t i = 0; i < data.size(); ++i) REQUIRE(preds[i].label == labels[i]);
}

TEST_CASE("default C grids match the protocol") {
  std::vector<double> zn = default_c_grid(NormMode::kZn);
  std::vector<double> znl2 = default_c_grid(NormMode::kZnL2);
  REQUIRE(zn.size() == 8);
  REQUIRE(znl2.size() == 8);
  for (int e = -6; e <= 1; ++e)
    REQUIRE(zn[static_cast<std::size_t>(e + 6)] == Catch::Approx(std::pow(10.0, e)));
  for (int e = -1; e <= 6; ++e)
    REQUIRE(znl2[static_cast<std::size_t>(e + 1)] == Catch::Approx(std::pow(10.0, e)));
}

TEST_CASE("grid_search: separable blobs reach high validation UAR") {
  std::mt19937_64 rng(263);
  const std::vector<std::string> order = {"a", "b", "c", "d"};
  std::vector<FeatureVector> train = blob_data(rng, order, 10, 16, 0.5, "train");
  std::vector<FeatureVector> valid = blob_data(rng, order, 5, 16, 0.5, "valid");
  GridSearchReport report = grid_search(train, valid, {}, NormMode::kZnL2, order);
  REQUIRE(report.points.size() == 8);
  REQUIRE(report.best_uar >= 0.95);
  REQUIRE_FALSE(report.degenerate_valid_warning);
}

TEST_CASE("grid_search: one-class validation set warns and uses that class's recall") {
  std::mt19937_64 rng(269);
  const std::vector<std::string> order = {"a", "b"};
  std::vector<FeatureVector> train = blob_data(rng, order, 8, 6, 0.4, "train");
  std::vector<FeatureVector> valid = blob_data(rng, {"a"}, 6, 6, 0.4, "valid");
  GridSearchReport report = grid_search(train, valid, {1.0}, NormMode::kZn, order);
  REQUIRE(report.degenerate_valid_warning);
  REQUIRE(report.points[0].missing_classes == 1);
  // All validation items are class a; UAR over present classes is a-recall.
  REQUIRE(report.points[0].uar >= 0.0);
  REQUIRE(report.points[0].uar <= 1.0);
  REQUIRE(report.points[0].uar == report.best_uar);
}

TEST_CASE("grid_search: ties break to the smaller C and C must be positive") {
  std::mt19937_64 rng(271);
  const std::vector<std::string> order = {"a", "b"};
  std::vector<FeatureVector> train = blob_data(rng, order, 10, 6, 0.2, "train");
  std::vector<FeatureVector> valid = blob_data(rng, order, 5, 6, 0.2, "valid");
  // Perfectly separable: every C scores UAR 1, so the smallest C wins.
  GridSearchReport report = grid_search(train, valid, {100.0, 0.1, 10.0}, NormMode::kZn, order);
  REQUIRE(report.best_uar == 1.0);
  REQUIRE(report.best_c == 0.1);
  REQUIRE_THROWS_AS(grid_search(train, valid, {-1.0}, NormMode::kZn, order), ConfigError);
}

TEST_CASE("refit_and_test: protocol discipline") {
  std::mt19937_64 rng(277);
  const std::vector<std::string> order = {"a", "b", "c"};
  std::vector<FeatureVector> train = blob_data(rng, order, 8, 10, 0.4, "train");
  std::vector<FeatureVector> valid = blob_data(rng, order, 4, 10, 0.4, "valid");
  std::vector<FeatureVector> test = blob_data(rng, order, 4, 10, 0.4, "test");

  SECTION("single probe on separable data") {
    TestReport report = refit_and_test(train, valid, test, 1.0, NormMode::kZnL2, order);
    REQUIRE(report.test_evaluations == 1);
    REQUIRE(report.uar >= 0.95);
    REQUIRE(report.accuracy >= 0.95);
  }

  SECTION("overlapping sets are a protocol error") {
    std::vector<FeatureVector> bad_test = test;
    bad_test.push_back(train.front());
    REQUIRE_THROWS_AS(refit_and_test(train, valid, bad_test, 1.0, NormMode::kZn, order),
                      ProtocolError);
  }

  SECTION("refit on train+valid changes the normalization stats") {
    NormStats train_only = fit_norm(train, false);
    std::vector<FeatureVector> combined = train;
    combined.insert(combined.end(), valid.begin(), valid.end());
    NormStats refit = fit_norm(combined, false);
    bool any_differ = false;
    for (std::size_t i = 0; i < train_only.mean.size(); ++i)
      any_differ = any_differ || train_only.mean[i] != refit.mean[i];
    REQUIRE(any_differ);
  }
}

TEST_CASE("model persistence: byte round trip preserves predictions") {
  testutil::TempDir tmp("model");
  std::mt19937_64 rng(281);
  const std::vector<std::string> order = {"hoot", "chirp", "background"};
  std::vector<FeatureVector> data = blob_data(rng, order, 6, 9, 0.5, "train");
  NormStats norm = fit_norm(data, true);
  Eigen::MatrixXd x = to_matrix(data, norm);
  std::vector<std::string> labels;
  for (const FeatureVector& f : data) labels.push_back(f.label);
  KelmModel model = train_kelm(x, labels, order, 100.0, norm);

  save_model(model, tmp.file("m.bin"));
  KelmModel back = load_model(tmp.file("m.bin"));
  REQUIRE(back.labels == model.labels);
  REQUIRE(back.regularization_c == model.regularization_c);
  REQUIRE(back.norm.apply_l2 == model.norm.apply_l2);

  std::normal_distribution<double> dist(0.0, 2.0);
  for (int probe = 0; probe < 10; ++probe) {
    std::vector<double> q(9);
    for (double& v : q) v = dist(rng);
    Prediction a = predict_raw(model, q);
    Prediction b = predict_raw(back, q);
    REQUIRE(a.label == b.label);
    REQUIRE(a.scores == b.scores);  // bit-exact
  }

  SECTION("format errors") {
    testutil::write_binary(tmp.file("junk.bin"), "NOPE....");
    REQUIRE_THROWS_AS(load_model(tmp.file("junk.bin")), FormatError);
  }
}
