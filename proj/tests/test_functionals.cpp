// tests/test_functionals.cpp — the ten contour functionals and the 1140-dim
// feature vector.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "test_util.hpp"
#include "voxkit/functionals.hpp"

using namespace voxkit;

namespace {

LldMatrix lld_from_rows(const std::vector<std::vector<double>>& rows) {
  LldMatrix lld;
  lld.values = Matrix(rows.size(), rows.front().size());
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t c = 0; c < rows.front().size(); ++c) lld.values.at(t, c) = rows[t][c];
  return lld;
}

// Single-column contour -> the 10 functionals of that column.
std::vector<double> functionals_of(const std::vector<double>& contour) {
  std::vector<std::vector<double>> rows;
  for (double v : contour) rows.push_back({v});
  FeatureVector fv = summarize(lld_from_rows(rows));
  return std::vector<double>(fv.values.begin(), fv.values.begin() + 10);
}

enum { kMean, kStd, kSlope, kOffset, kCurv, kMin, kMinPos, kMax, kMaxPos, kZcr };

}  // namespace

TEST_CASE("summarize: constant contour") {
  const double c = 3.25;
  std::vector<double> f = functionals_of(std::vector<double>(10, c));
  REQUIRE(f[kMean] == c);
  REQUIRE(f[kStd] == 0.0);
  REQUIRE(f[kSlope] == 0.0);
  REQUIRE(f[kOffset] == Catch::Approx(c));
  REQUIRE(std::abs(f[kCurv]) < 1e-9);
  REQUIRE(f[kMin] == c);
  REQUIRE(f[kMinPos] == 0.0);  // first occurrence
  REQUIRE(f[kMax] == c);
  REQUIRE(f[kMaxPos] == 0.0);
  REQUIRE(f[kZcr] == 0.0);
}

TEST_CASE("summarize: linear 0->1 contour") {
  // Oracle: closed-form least squares on the generated points.
  const std::size_t n = 24;
  std::vector<double> contour(n);
  for (std::size_t t = 0; t < n; ++t)
    contour[t] = static_cast<double>(t) / static_cast<double>(n - 1);
  std::vector<double> f = functionals_of(contour);

  auto line = oracles::naive_polyfit(contour, 1);
  auto quad = oracles::naive_polyfit(contour, 2);
  REQUIRE(f[kSlope] == Catch::Approx(1.0).margin(1e-9));
  REQUIRE(f[kOffset] == Catch::Approx(0.0).margin(1e-9));
  REQUIRE(std::abs(f[kCurv]) <= 1e-9);
  REQUIRE(f[kSlope] == Catch::Approx(line[1]).margin(1e-9));
  REQUIRE(f[kOffset] == Catch::Approx(line[0]).margin(1e-9));
  REQUIRE(f[kCurv] == Catch::Approx(quad[2]).margin(1e-9));
  REQUIRE(f[kMinPos] == 0.0);
  REQUIRE(f[kMaxPos] == 1.0);
}

TEST_CASE("summarize: 114 columns yield 1140 features") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  LldMatrix lld;
  lld.values = Matrix(17, 114);
  for (double& v : lld.values.data) v = dist(rng);
  FeatureVector fv = summarize(lld);
  REQUIRE(fv.values.size() == 1140);
  REQUIRE(kFeatureDims == 1140);
}

TEST_CASE("summarize: single-frame contour takes the degenerate values") {
  std::vector<double> f = functionals_of({2.5});
  REQUIRE(f[kMean] == 2.5);
  REQUIRE(f[kStd] == 0.0);
  REQUIRE(f[kSlope] == 0.0);
  REQUIRE(f[kOffset] == 2.5);
  REQUIRE(f[kCurv] == 0.0);
  REQUIRE(f[kMinPos] == 0.0);
  REQUIRE(f[kMaxPos] == 0.0);
  REQUIRE(f[kZcr] == 0.0);
}

TEST_CASE("summarize: polynomial fits match the normal-equation oracle") {
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> dist(-4.0, 4.0);
  for (int trial = 0; trial < 25; ++trial) {
    std::size_t n = 3 + rng() % 40;
    std::vector<double> contour(n);
    for (double& v : contour) v = dist(rng);
    std::vector<double> f = functionals_of(contour);
    auto line = oracles::naive_polyfit(contour, 1);
    auto quad = oracles::naive_polyfit(contour, 2);
    REQUIRE(f[kSlope] == Catch::Approx(line[1]).margin(1e-8));
    REQUIRE(f[kOffset] == Catch::Approx(line[0]).margin(1e-8));
    REQUIRE(f[kCurv] == Catch::Approx(quad[2]).margin(1e-7));
  }
}

TEST_CASE("summarize: first-order LS identity and order statistics (property)") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng() % 30;
    std::vector<double> contour(n);
    for (double& v : contour) v = dist(rng);
    std::vector<double> f = functionals_of(contour);

    // offset + slope * tbar = mean, tbar = 0.5 on normalized time.
    REQUIRE(f[kOffset] + 0.5 * f[kSlope] == Catch::Approx(f[kMean]).margin(1e-9));
    REQUIRE(f[kMin] <= f[kMean] + 1e-12);
    REQUIRE(f[kMean] <= f[kMax] + 1e-12);
    REQUIRE(f[kMinPos] >= 0.0);
    REQUIRE(f[kMinPos] <= 1.0);
    REQUIRE(f[kMaxPos] >= 0.0);
    REQUIRE(f[kMaxPos] <= 1.0);

    // Relative positions are argindex/(n-1), first occurrence.
    std::size_t imin = static_cast<std::size_t>(
        std::min_element(contour.begin(), contour.end()) - contour.begin());
    std::size_t imax = static_cast<std::size_t>(
        std::max_element(contour.begin(), contour.end()) - contour.begin());
    REQUIRE(f[kMinPos] == static_cast<double>(imin) / static_cast<double>(n - 1));
    REQUIRE(f[kMaxPos] == static_cast<double>(imax) / static_cast<double>(n - 1));
  }
}

TEST_CASE("summarize: population standard deviation (divisor n)") {
  std::vector<double> f = functionals_of({0.0, 2.0});
  REQUIRE(f[kStd] == 1.0);  // divisor n: sqrt(((0-1)^2+(2-1)^2)/2)
  REQUIRE(f[kMean] == 1.0);
}

TEST_CASE("summarize: zcr invariant under positive affine scaling (property)") {
  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.1, 50.0);
  std::uniform_real_distribution<double> offset(-20.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 3 + rng() % 40;
    std::vector<double> contour(n), mapped(n);
    for (double& v : contour) v = dist(rng);
    double a = scale(rng), b = offset(rng);
    for (std::size_t i = 0; i < n; ++i) mapped[i] = a * contour[i] + b;
    REQUIRE(functionals_of(contour)[kZcr] == functionals_of(mapped)[kZcr]);
  }
}

TEST_CASE("summarize: zcr counts sign transitions per frame step") {
  // Normalized alternation crosses zero at every step.
  REQUIRE(functionals_of({1.0, -1.0, 1.0, -1.0})[kZcr] == Catch::Approx(1.0));
  // Monotone contour never crosses after normalization... except the sign
  // flip across the midpoint, giving exactly one transition.
  REQUIRE(functionals_of({0.0, 1.0, 2.0, 3.0, 4.0})[kZcr] == Catch::Approx(0.25));
  // Zero sample takes its successor's sign: +1,0,+1 has no transition.
  std::vector<double> f = functionals_of({1.0, 0.0, 1.0, -2.0});
  // normalized: 1, 0.333.., 1, -1 -> signs +,+,+,- -> one transition / 3.
  REQUIRE(f[kZcr] == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("summarize: batch order independence") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  std::vector<LldMatrix> batch;
  for (int i = 0; i < 6; ++i) {
    LldMatrix lld;
    lld.values = Matrix(5 + static_cast<std::size_t>(i), 114);
    for (double& v : lld.values.data) v = dist(rng);
    batch.push_back(std::move(lld));
  }
  std::vector<FeatureVector> forward, backward;
  for (const LldMatrix& lld : batch) forward.push_back(summarize(lld));
  for (auto it = batch.rbegin(); it != batch.rend(); ++it) backward.push_back(summarize(*it));
  for (std::size_t i = 0; i < batch.size(); ++i)
    REQUIRE(forward[i].values == backward[batch.size() - 1 - i].values);
}

TEST_CASE("feature csv: layout and round trip") {
  testutil::TempDir tmp("features");
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);

  std::vector<std::string> names = feature_column_names();
  REQUIRE(names.size() == 1140);
  REQUIRE(names[0] == "lld0_mean");
  REQUIRE(names[9] == "lld0_zcr");
  REQUIRE(names[10] == "lld1_mean");
  REQUIRE(names[1139] == "lld113_zcr");

  std::vector<FeatureVector> features(3);
  for (std::size_t i = 0; i < features.size(); ++i) {
    features[i].values.resize(1140);
    for (double& v : features[i].values) v = dist(rng);
    features[i].label = i == 2 ? kBackgroundLabel : "hoot";
    features[i].chunk_ref = {"rec" + std::to_string(i), {1.25 * static_cast<double>(i), 2.5}};
  }
  write_features_csv(features, tmp.file("f.csv"));
  std::vector<FeatureVector> back = read_features_csv(tmp.file("f.csv"));
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    REQUIRE(back[i].values == features[i].values);  // shortest round-trip form
    REQUIRE(back[i].label == features[i].label);
    REQUIRE(back[i].chunk_ref == features[i].chunk_ref);
  }
}
