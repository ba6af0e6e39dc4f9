#include "ppui/neighbors.hpp"

#include <algorithm>
#include <numeric>

namespace ppui {

KnnModel fit_knn(Matrix X, Labels y, KnnParams params) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("row count and label count differ");
  if (y.empty()) throw ConfigError("KNN needs at least one training row");
  if (params.k < 1) throw ConfigError("KNN k must be at least 1");
  if (static_cast<std::size_t>(params.k) > y.size()) {
    throw ConfigError("KNN k=" + std::to_string(params.k) + " exceeds the " + std::to_string(y.size()) +
                      " training rows");
  }
  KnnModel m;
  m.classes = distinct_labels(y);
  m.X = std::move(X);
  m.y = std::move(y);
  m.params = params;
  return m;
}

std::vector<std::size_t> nearest_neighbors(const Matrix& X, const Eigen::Ref<const RowVector>& x, std::size_t k) {
  if (X.cols() != x.size()) throw ConfigError("row width does not match the training matrix");
  const Vector d2 = (X.rowwise() - x).rowwise().squaredNorm();
  std::vector<std::size_t> idx(static_cast<std::size_t>(X.rows()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  k = std::min(k, idx.size());
  auto closer = [&](std::size_t a, std::size_t b) {
    const auto da = d2(static_cast<Eigen::Index>(a)), db = d2(static_cast<Eigen::Index>(b));
    return da < db || (da == db && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), closer);
  idx.resize(k);
  return idx;
}

Prediction knn_predict(const KnnModel& model, const Eigen::Ref<const RowVector>& x) {
  if (static_cast<std::size_t>(x.size()) != static_cast<std::size_t>(model.X.cols())) {
    throw ConfigError("row width does not match the model");
  }
  if (!x.allFinite()) throw DataError("prediction input contains non-finite values");
  const auto k = static_cast<std::size_t>(model.params.k);
  if (k > model.rows()) throw ConfigError("KNN k exceeds the training size");
  const auto neighbors = nearest_neighbors(model.X, x, k);

  Vector weight = Vector::Zero(static_cast<Eigen::Index>(model.classes.size()));
  auto slot = [&](std::size_t row) {
    return static_cast<Eigen::Index>(
        std::lower_bound(model.classes.begin(), model.classes.end(), model.y[row]) - model.classes.begin());
  };
  if (model.params.weighting == Weighting::uniform) {
    for (auto n : neighbors) weight(slot(n)) += 1.0;
  } else {
    std::vector<double> dist;
    bool exact = false;
    for (auto n : neighbors) {
      dist.push_back((model.X.row(static_cast<Eigen::Index>(n)) - x).norm());
      exact = exact || dist.back() == 0.0;
    }
    for (std::size_t i = 0; i < neighbors.size(); ++i) {
      if (exact) {
        if (dist[i] == 0.0) weight(slot(neighbors[i])) += 1.0;
      } else {
        weight(slot(neighbors[i])) += 1.0 / (dist[i] + kDistanceDelta);
      }
    }
  }
  Prediction p;
  p.probabilities = weight / weight.sum();
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < weight.size(); ++c) {
    if (weight(c) > weight(best)) best = c;
  }
  p.label = model.classes[static_cast<std::size_t>(best)];
  return p;
}

}  // namespace ppui
