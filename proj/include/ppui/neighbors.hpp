#pragma once

// K-nearest-neighbors over Euclidean distance.

#include "ppui/bayes.hpp"
#include "ppui/common.hpp"

namespace ppui {

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar euclidean_distance(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw ConfigError("euclidean_distance: width mismatch");
  return (a - b).norm();
}

enum class Weighting { uniform, distance };

/// Offset in inverse-distance weights 1 / (d + delta).
inline constexpr double kDistanceDelta = 1e-12;

struct KnnParams {
  int k = 5;
  Weighting weighting = Weighting::uniform;

  friend bool operator==(const KnnParams&, const KnnParams&) = default;
};

struct KnnModel {
  Matrix X;
  Labels y;
  Labels classes;
  KnnParams params;

  std::size_t rows() const { return y.size(); }
};

/// Stores the training set. Throws ConfigError when k < 1 or k > rows.
KnnModel fit_knn(Matrix X, Labels y, KnnParams params = {});

/// Indices of the k nearest training rows, ordered by (distance, row index).
std::vector<std::size_t> nearest_neighbors(const Matrix& X, const Eigen::Ref<const RowVector>& x, std::size_t k);

Prediction knn_predict(const KnnModel& model, const Eigen::Ref<const RowVector>& x);

}  // namespace ppui
