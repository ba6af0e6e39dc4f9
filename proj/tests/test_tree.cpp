#include <doctest.h>

#include "oracles.hpp"
#include "ppui/tree.hpp"

using namespace ppui;

namespace {

std::vector<std::size_t> counts(std::initializer_list<std::size_t> c) { return c; }

std::map<int, double> as_map(const std::vector<std::size_t>& c) {
  std::map<int, double> m;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > 0) m[static_cast<int>(i)] = static_cast<double>(c[i]);
  }
  return m;
}

}  // namespace

TEST_CASE("impurity hand cases") {
  CHECK(entropy(counts({5, 5})) == 1.0);
  CHECK(entropy(counts({1, 1, 1, 1})) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(entropy(counts({7, 0})) == 0.0);
  CHECK(gini(counts({4})) == 0.0);
  CHECK(gini(counts({5, 5})) == 0.5);
  CHECK(gini(counts({2, 1, 1})) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK_THROWS_AS(gini(counts({0, 0})), ConfigError);
  CHECK_THROWS_AS(entropy(counts({})), ConfigError);
}

TEST_CASE("property: impurity bounds and agreement with the counting oracle") {
  oracle::Gen gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = static_cast<std::size_t>(gen.integer(1, 5));
    std::vector<std::size_t> c(k);
    for (auto& v : c) v = static_cast<std::size_t>(gen.integer(0, 9));
    c[0] += 1;
    const double g = gini(c), h = entropy(c);
    CHECK(g >= 0.0);
    CHECK(g <= 1.0 - 1.0 / static_cast<double>(k) + 1e-12);
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(k)) + 1e-12);
    CHECK(std::fabs(g - oracle::gini_of(as_map(c))) < 1e-12);
    CHECK(std::fabs(h - oracle::entropy_of(as_map(c))) < 1e-12);
  }
}

TEST_CASE("best split on one sorted feature") {
  const auto s = best_split(oracle::to_matrix({{1}, {2}, {3}, {4}}), {0, 0, 1, 1}, Criterion::gini);
  REQUIRE(s);
  CHECK(s->feature == 0);
  CHECK(s->threshold == 2.5);
  CHECK(s->gain == doctest::Approx(0.5));
  CHECK(!best_split(oracle::to_matrix({{1}, {2}}), {1, 1}, Criterion::gini));
  CHECK(!best_split(oracle::to_matrix({{3}, {3}}), {0, 1}, Criterion::entropy));
}

TEST_CASE("equal gains go to the lowest feature") {
  const auto s = best_split(oracle::to_matrix({{0, 0}, {1, 1}}), {0, 1}, Criterion::gini);
  REQUIRE(s);
  CHECK(s->feature == 0);
}

TEST_CASE("property: best_split matches the exhaustive oracle") {
  oracle::Gen gen(22);
  int mismatches = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(2, 8));
    const auto d = static_cast<std::size_t>(gen.integer(1, 3));
    const auto X = gen.grid_rows(n, d, 0, 4);
    const auto y = gen.labels(n, gen.integer(1, 3), 0);
    for (auto crit : {Criterion::gini, Criterion::entropy}) {
      const auto want = oracle::best_split(X, y, crit == Criterion::entropy);
      const auto got = best_split(oracle::to_matrix(X), y, crit);
      if (want.has_value() != got.has_value()) {
        ++mismatches;
        continue;
      }
      if (!want) continue;
      if (want->feature != got->feature || want->threshold != got->threshold ||
          std::fabs(want->gain - got->gain) > 1e-12) {
        ++mismatches;
      }
    }
  }
  CHECK(mismatches == 0);
}

TEST_CASE("max_depth 0 gives a single majority leaf") {
  const auto m = fit_tree(oracle::to_matrix({{0}, {1}, {2}}), {3, 5, 5}, {Criterion::gini, 0, 2});
  CHECK(m.nodes.size() == 1);
  CHECK(m.depth() == 0);
  CHECK(predict_tree(m, oracle::to_row({0})) == 5);
}

TEST_CASE("balanced XOR is learned exactly at depth 2") {
  const auto X = oracle::to_matrix({{0, 0}, {1, 1}, {0, 1}, {1, 0}});
  const Labels y = {0, 0, 1, 1};
  CHECK(!best_split(X, y, Criterion::gini));
  for (auto crit : {Criterion::gini, Criterion::entropy}) {
    const auto m = fit_tree(X, y, {crit, 2, 2});
    CHECK(m.depth() == 2);
    for (Eigen::Index i = 0; i < X.rows(); ++i) CHECK(predict_tree(m, X.row(i)) == y[static_cast<std::size_t>(i)]);
    CHECK(fit_tree(X, y, {crit, 1, 2}).leaves() == 2);
  }
}

TEST_CASE("XOR with an uneven corner is learned exactly at depth 2") {
  const auto X = oracle::to_matrix({{0, 0}, {0, 1}, {1, 0}, {1, 1}, {0, 0}, {1, 1}, {0, 0}});
  const Labels y = {0, 1, 1, 0, 0, 0, 0};
  const auto m = fit_tree(X, y, {Criterion::gini, 2, 2});
  CHECK(m.depth() == 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) CHECK(predict_tree(m, X.row(i)) == y[static_cast<std::size_t>(i)]);
}

TEST_CASE("property: unlimited trees fit distinct-row training data exactly") {
  oracle::Gen gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(2, 20));
    const auto X = gen.rows(n, 2, 0, 1);
    const auto y = gen.labels(n, 3, 0);
    for (auto crit : {Criterion::gini, Criterion::entropy}) {
      const auto m = fit_tree(oracle::to_matrix(X), y, {crit, std::nullopt, 2});
      for (std::size_t i = 0; i < n; ++i) CHECK(predict_tree(m, oracle::to_row(X[i])) == y[i]);
      for (const auto& node : m.nodes) {
        if (node.split) CHECK(node.split->gain >= 0.0);
        if (m.params.max_depth) CHECK(node.depth <= *m.params.max_depth);
      }
    }
  }
}

TEST_CASE("property: depth and min_samples_split limits hold") {
  oracle::Gen gen(24);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(gen.integer(4, 30));
    const auto X = gen.rows(n, 3, 0, 1);
    const auto y = gen.labels(n, 2, 0);
    const int depth = gen.integer(0, 3);
    const int min_split = gen.integer(2, 6);
    const auto m = fit_tree(oracle::to_matrix(X), y, {Criterion::gini, depth, min_split});
    CHECK(m.depth() <= depth);
    for (const auto& node : m.nodes) {
      if (node.split) CHECK(node.samples >= static_cast<std::size_t>(min_split));
    }
  }
}

TEST_CASE("tree preconditions and rendering") {
  CHECK_THROWS_AS(fit_tree(Matrix(0, 1), {}), ConfigError);
  CHECK_THROWS_AS(fit_tree(oracle::to_matrix({{0}, {1}}), {0}), ConfigError);
  const auto m = fit_tree(oracle::to_matrix({{1}, {2}, {3}, {4}}), {0, 0, 1, 1});
  CHECK_THROWS_AS(predict_tree(m, oracle::to_row({1, 2})), ConfigError);
  const auto text = render_tree(m, {"AGE"});
  CHECK(text.find("AGE <= 2.5") != std::string::npos);
}

TEST_CASE("randomized importance favors the predictive feature") {
  oracle::Gen gen(25);
  oracle::Rows X;
  oracle::Ints y;
  for (int i = 0; i < 100; ++i) {
    const int label = i % 2;
    X.push_back({label + gen.real(-0.2, 0.2), gen.real(0, 1)});
    y.push_back(label);
  }
  const auto imp = randomized_importance(oracle::to_matrix(X), y, 100, 1);
  CHECK(imp.sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(imp(0) > 0.8);
  CHECK(randomized_importance(oracle::to_matrix(X), y, 100, 1) == imp);
  CHECK_THROWS_AS(randomized_importance(oracle::to_matrix(X), y, 0, 1), ConfigError);
}
