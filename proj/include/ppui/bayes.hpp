#pragma once

// Gaussian and Complement Naive Bayes.

#include <string>
#include <vector>

#include "ppui/common.hpp"

namespace ppui {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Normal density N(x; mean, sd). Throws ConfigError for sd <= 0.
template <typename Scalar>
Scalar gaussian_pdf(Scalar x, Scalar mean, Scalar sd) {
  if (!(sd > Scalar(0))) throw ConfigError("gaussian_pdf: standard deviation must be positive");
  const Scalar z = (x - mean) / sd;
  return std::exp(Scalar(-0.5) * z * z) / std::sqrt(Scalar(kTwoPi) * sd * sd);
}

template <typename Scalar>
Scalar gaussian_log_pdf(Scalar x, Scalar mean, Scalar sd) {
  const Scalar z = (x - mean) / sd;
  return Scalar(-0.5) * z * z - std::log(sd) - Scalar(0.5) * std::log(Scalar(kTwoPi));
}

struct GaussianNBModel {
  Labels classes;  // ascending
  Vector priors;   // aligned with classes
  Matrix means;    // classes x features
  Matrix sds;      // classes x features, floored at sqrt(variance_floor)
  double variance_floor = 0.0;
  /// Classes with a single training row: sd undefined, set to the floor.
  Labels singleton_classes;

  std::size_t features() const { return static_cast<std::size_t>(means.cols()); }
};

struct Prediction {
  Label label = 0;
  /// Aligned with the model's class list.
  Vector probabilities;
};

/// Relative variance floor: epsilon = kVarianceSmoothing * max feature variance.
inline constexpr double kVarianceSmoothing = 1e-9;

GaussianNBModel fit_gaussian_nb(const Matrix& X, const Labels& y);
/// Posteriors computed in log space and normalized; ties go to the lowest class.
Prediction predict_gaussian_nb(const GaussianNBModel& model, const Eigen::Ref<const RowVector>& x);

struct ComplementNBModel {
  Labels classes;
  /// classes x features, normalized log complement probabilities (all <= 0).
  Matrix weights;
  double alpha = 1.0;

  std::size_t features() const { return static_cast<std::size_t>(weights.cols()); }
};

/// X must be non-negative. Throws ConfigError for single-class data or alpha <= 0.
ComplementNBModel fit_complement_nb(const Matrix& X, const Labels& y, double alpha = 1.0);
/// Per-class complement scores sum_j x_j * w_cj.
Vector complement_scores(const ComplementNBModel& model, const Eigen::Ref<const RowVector>& x);
/// Class with the smallest complement score; ties go to the lowest class.
Label predict_complement_nb(const ComplementNBModel& model, const Eigen::Ref<const RowVector>& x);

std::string dump(const GaussianNBModel& model);
std::string dump(const ComplementNBModel& model);

}  // namespace ppui
