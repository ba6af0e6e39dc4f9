#include "ppui/bayes.hpp"

#include <algorithm>
#include <sstream>

namespace ppui {

namespace {

void check_fit_input(const Matrix& X, const Labels& y) {
  if (X.rows() == 0) throw ConfigError("cannot fit on an empty dataset");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("row count and label count differ");
  if (!X.allFinite()) throw DataError("training matrix contains non-finite values");
}

std::size_t class_index(const Labels& classes, Label l) {
  return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), l) - classes.begin());
}

void check_row(std::size_t width, const Eigen::Ref<const RowVector>& x) {
  if (static_cast<std::size_t>(x.size()) != width) throw ConfigError("row width does not match the model");
  if (!x.allFinite()) throw DataError("prediction input contains non-finite values");
}

}  // namespace

GaussianNBModel fit_gaussian_nb(const Matrix& X, const Labels& y) {
  check_fit_input(X, y);
  GaussianNBModel m;
  m.classes = distinct_labels(y);
  const auto k = static_cast<Eigen::Index>(m.classes.size());
  const auto d = X.cols();
  const double n = static_cast<double>(X.rows());

  double max_var = 0.0;
  if (X.rows() > 1) {
    const RowVector mu = X.colwise().mean();
    const RowVector var = (X.rowwise() - mu).colwise().squaredNorm() / (n - 1.0);
    max_var = d > 0 ? var.maxCoeff() : 0.0;
  }
  // all-constant training data still needs a positive floor
  m.variance_floor = kVarianceSmoothing * (max_var > 0.0 ? max_var : 1.0);
  const double sd_floor = std::sqrt(m.variance_floor);

  m.priors = Vector::Zero(k);
  m.means = Matrix::Zero(k, d);
  m.sds = Matrix::Zero(k, d);
  Vector counts = Vector::Zero(k);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(class_index(m.classes, y[i]));
    counts(c) += 1.0;
    m.means.row(c) += X.row(static_cast<Eigen::Index>(i));
  }
  for (Eigen::Index c = 0; c < k; ++c) m.means.row(c) /= counts(c);
  for (std::size_t i = 0; i < y.size(); ++i) {
    const auto c = static_cast<Eigen::Index>(class_index(m.classes, y[i]));
    m.sds.row(c) += (X.row(static_cast<Eigen::Index>(i)) - m.means.row(c)).cwiseAbs2();
  }
  for (Eigen::Index c = 0; c < k; ++c) {
    if (counts(c) < 2.0) {
      m.sds.row(c).setConstant(sd_floor);
      m.singleton_classes.push_back(m.classes[static_cast<std::size_t>(c)]);
    } else {
      m.sds.row(c) = (m.sds.row(c) / (counts(c) - 1.0)).cwiseSqrt().cwiseMax(sd_floor);
    }
  }
  m.priors = counts / n;
  return m;
}

Prediction predict_gaussian_nb(const GaussianNBModel& model, const Eigen::Ref<const RowVector>& x) {
  check_row(model.features(), x);
  const auto k = static_cast<Eigen::Index>(model.classes.size());
  Vector log_post(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    double lp = std::log(model.priors(c));
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      lp += gaussian_log_pdf(x(j), model.means(c, j), model.sds(c, j));
    }
    log_post(c) = lp;
  }
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < k; ++c) {
    if (log_post(c) > log_post(best)) best = c;
  }
  Prediction p;
  p.label = model.classes[static_cast<std::size_t>(best)];
  p.probabilities = (log_post.array() - log_post(best)).exp();
  p.probabilities /= p.probabilities.sum();
  return p;
}

ComplementNBModel fit_complement_nb(const Matrix& X, const Labels& y, double alpha) {
  check_fit_input(X, y);
  if (!(alpha > 0.0)) throw ConfigError("complement NB smoothing alpha must be positive");
  if ((X.array() < 0.0).any()) throw DataError("complement NB requires non-negative features");
  ComplementNBModel m;
  m.alpha = alpha;
  m.classes = distinct_labels(y);
  if (m.classes.size() < 2) throw ConfigError("complement NB needs at least two classes");
  const auto k = static_cast<Eigen::Index>(m.classes.size());

  Matrix feature_totals = Matrix::Zero(k, X.cols());
  for (std::size_t i = 0; i < y.size(); ++i) {
    feature_totals.row(static_cast<Eigen::Index>(class_index(m.classes, y[i]))) += X.row(static_cast<Eigen::Index>(i));
  }
  const RowVector grand = feature_totals.colwise().sum();
  m.weights.resize(k, X.cols());
  for (Eigen::Index c = 0; c < k; ++c) {
    const RowVector complement = (grand - feature_totals.row(c)).array() + alpha;
    const RowVector logged = (complement / complement.sum()).array().log();
    // a single feature logs to exactly zero; keep the row zero rather than 0/0
    const double l1 = logged.cwiseAbs().sum();
    m.weights.row(c) = l1 > 0.0 ? RowVector(logged / l1) : RowVector::Zero(logged.size());
  }
  return m;
}

Vector complement_scores(const ComplementNBModel& model, const Eigen::Ref<const RowVector>& x) {
  check_row(model.features(), x);
  if ((x.array() < 0.0).any()) throw DataError("complement NB requires non-negative features");
  return model.weights * x.transpose();
}

Label predict_complement_nb(const ComplementNBModel& model, const Eigen::Ref<const RowVector>& x) {
  const Vector s = complement_scores(model, x);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < s.size(); ++c) {
    if (s(c) < s(best)) best = c;
  }
  return model.classes[static_cast<std::size_t>(best)];
}

std::string dump(const GaussianNBModel& model) {
  std::ostringstream os;
  os << "GaussianNB variance_floor=" << model.variance_floor << '\n';
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    os << "class " << model.classes[c] << " prior=" << model.priors(ci) << "\n  mean=" << model.means.row(ci)
       << "\n  sd=" << model.sds.row(ci) << '\n';
  }
  return os.str();
}

std::string dump(const ComplementNBModel& model) {
  std::ostringstream os;
  os << "ComplementNB alpha=" << model.alpha << '\n';
  for (std::size_t c = 0; c < model.classes.size(); ++c) {
    os << "class " << model.classes[c] << " weights=" << model.weights.row(static_cast<Eigen::Index>(c)) << '\n';
  }
  return os.str();
}

}  // namespace ppui
