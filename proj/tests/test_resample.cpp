#include <doctest.h>

#include <map>

#include "oracles.hpp"
#include "ppui/resample.hpp"

using namespace ppui;

namespace {

std::map<Label, std::size_t> class_counts(const Labels& y) {
  std::map<Label, std::size_t> m;
  for (auto l : y) ++m[l];
  return m;
}

/// k nearest same-class rows of `seed`, self excluded, by (distance, index).
std::vector<std::size_t> same_class_neighbors(const oracle::Rows& X, const oracle::Ints& y, std::size_t seed,
                                              std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (i == seed || y[i] != y[seed]) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < X[i].size(); ++j) s += (X[i][j] - X[seed][j]) * (X[i][j] - X[seed][j]);
    d.emplace_back(std::sqrt(s), i);
  }
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < std::min(k, d.size()); ++r) out.push_back(d[r].second);
  return out;
}

}  // namespace

TEST_CASE("random oversampling pads the minority to the majority count") {
  const auto X = oracle::to_matrix({{0}, {1}, {2}, {3}, {4}, {10}, {11}});
  const Labels y = {0, 0, 0, 0, 0, 1, 1};
  const auto r = random_oversample(X, y, 3);
  CHECK(class_counts(r.y) == std::map<Label, std::size_t>{{0, 5}, {1, 5}});
  CHECK(r.X.rows() == 10);
  for (std::size_t i = 0; i < r.origin.size(); ++i) {
    const auto& o = r.origin[i];
    CHECK(y[o.seed_row] == 1);
    CHECK(o.neighbor_row == o.seed_row);
    CHECK(r.X.row(7 + static_cast<Eigen::Index>(i)) == X.row(static_cast<Eigen::Index>(o.seed_row)));
  }
}

TEST_CASE("balanced input comes back unchanged") {
  const auto X = oracle::to_matrix({{0}, {1}, {2}, {3}});
  const Labels y = {0, 1, 0, 1};
  for (const auto& r : {random_oversample(X, y, 1), smote(X, y, 5, 1)}) {
    CHECK(r.X == X);
    CHECK(r.y == y);
    CHECK(r.origin.empty());
  }
}

TEST_CASE("three classes 6/3/1 pad to 6/6/6 with 8 appended rows") {
  const auto X = oracle::to_matrix({{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}, {8}, {9}});
  const Labels y = {0, 0, 0, 0, 0, 0, 1, 1, 1, 2};
  const auto r = random_oversample(X, y, 9);
  CHECK(class_counts(r.y) == std::map<Label, std::size_t>{{0, 6}, {1, 6}, {2, 6}});
  CHECK(r.origin.size() == 8);
  REQUIRE(r.plan.classes.size() == 3);
  CHECK(r.plan.classes[2].original == 1);
  CHECK(r.plan.classes[2].target == 6);
}

TEST_CASE("SMOTE with k=1 on a two-point minority interpolates on the segment") {
  const auto X = oracle::to_matrix({{0, 0}, {2, 0}, {5, 5}, {6, 5}, {5, 6}, {6, 6}});
  const Labels y = {1, 1, 0, 0, 0, 0};
  const auto r = smote(X, y, 1, 11);
  CHECK(r.origin.size() == 2);
  for (Eigen::Index i = 6; i < r.X.rows(); ++i) {
    CHECK(r.X(i, 1) == 0.0);
    CHECK(r.X(i, 0) >= 0.0);
    CHECK(r.X(i, 0) <= 2.0);
    CHECK(r.y[static_cast<std::size_t>(i)] == 1);
  }
}

TEST_CASE("SMOTE clamps k to the class size and refuses a single-row class") {
  const auto X = oracle::to_matrix({{0}, {1}, {2}, {3}, {4}, {8}, {9}});
  const Labels y = {0, 0, 0, 0, 0, 1, 1};
  const auto r = smote(X, y, 5, 2);
  REQUIRE(!r.notes.empty());
  CHECK(r.notes[0].find("clamped to 1") != std::string::npos);
  CHECK_THROWS_AS(smote(oracle::to_matrix({{0}, {1}, {2}}), {0, 0, 1}, 5, 2), SmoteError);
  CHECK_THROWS_AS(smote(X, y, 0, 2), ConfigError);
  CHECK_THROWS_AS(random_oversample(X, Labels(7, 0), 2), ConfigError);
}

TEST_CASE("property: oversamplers balance, keep the input prefix and are deterministic") {
  oracle::Gen gen(31);
  int smote_points = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int k_classes = gen.integer(2, 4);
    const auto n = static_cast<std::size_t>(gen.integer(2 * k_classes, 24));
    const auto X = gen.rows(n, static_cast<std::size_t>(gen.integer(1, 3)), -5, 5);
    const auto y = gen.labels(n, k_classes, 2);
    const auto seed = static_cast<std::uint64_t>(trial);
    const int k = gen.integer(1, 5);

    for (int which = 0; which < 2; ++which) {
      const auto r = which == 0 ? random_oversample(oracle::to_matrix(X), y, seed)
                                : smote(oracle::to_matrix(X), y, k, seed);
      const auto counts = class_counts(r.y);
      std::size_t majority = 0;
      for (const auto& [l, c] : class_counts(y)) majority = std::max(majority, c);
      for (const auto& [l, c] : counts) CHECK(c == majority);
      CHECK(r.X.topRows(static_cast<Eigen::Index>(n)) == oracle::to_matrix(X));
      CHECK(std::equal(y.begin(), y.end(), r.y.begin()));
      CHECK(r.origin.size() == r.y.size() - n);

      const auto again = which == 0 ? random_oversample(oracle::to_matrix(X), y, seed)
                                    : smote(oracle::to_matrix(X), y, k, seed);
      CHECK(again.X == r.X);
      CHECK(again.y == r.y);

      if (which == 1) {
        for (std::size_t i = 0; i < r.origin.size(); ++i) {
          const auto& o = r.origin[i];
          const auto row = static_cast<Eigen::Index>(n + i);
          CHECK(y[o.seed_row] == r.y[static_cast<std::size_t>(row)]);
          std::size_t class_size = 0;
          for (int l : y) class_size += l == y[o.seed_row];
          const auto nn = same_class_neighbors(X, y, o.seed_row, std::min<std::size_t>(k, class_size - 1));
          CHECK(std::find(nn.begin(), nn.end(), o.neighbor_row) != nn.end());
          CHECK(o.lambda >= 0.0);
          CHECK(o.lambda < 1.0);
          for (std::size_t j = 0; j < X[0].size(); ++j) {
            const double a = X[o.seed_row][j], b = X[o.neighbor_row][j];
            CHECK(std::fabs(r.X(row, static_cast<Eigen::Index>(j)) - (a + o.lambda * (b - a))) < 1e-9);
            CHECK(r.X(row, static_cast<Eigen::Index>(j)) >= std::min(a, b) - 1e-9);
            CHECK(r.X(row, static_cast<Eigen::Index>(j)) <= std::max(a, b) + 1e-9);
          }
          ++smote_points;
        }
      }
    }
  }
  CHECK(smote_points > 100);
}

TEST_CASE("property: synthetic rows stay inside the class bounding box") {
  oracle::Gen gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(6, 20));
    const auto X = gen.rows(n, 2, 0, 1);
    const auto y = gen.labels(n, 3, 2);
    const auto r = smote(oracle::to_matrix(X), y, 3, static_cast<std::uint64_t>(trial));
    for (std::size_t i = n; i < r.y.size(); ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        double lo = 1e9, hi = -1e9;
        for (std::size_t s = 0; s < n; ++s) {
          if (y[s] != r.y[i]) continue;
          lo = std::min(lo, X[s][j]);
          hi = std::max(hi, X[s][j]);
        }
        const double v = r.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        CHECK(v >= lo - 1e-12);
        CHECK(v <= hi + 1e-12);
      }
    }
  }
}
