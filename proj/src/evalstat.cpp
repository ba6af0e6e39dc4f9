#include "ppui/evalstat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "ppui/resample.hpp"

namespace ppui {

std::vector<std::size_t> FoldAssignment::validation_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::training_rows(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> FoldAssignment::fold_sizes() const {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
  for (int f : fold_of) ++sizes[static_cast<std::size_t>(f)];
  return sizes;
}

FoldAssignment make_folds(const Labels& y, int k, std::uint64_t seed, bool stratified) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(k) > y.size()) {
    throw ConfigError("cannot make " + std::to_string(k) + " folds from " + std::to_string(y.size()) + " rows");
  }
  Rng rng(seed);
  std::vector<std::size_t> sequence;
  if (stratified) {
    std::map<Label, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < y.size(); ++i) by[y[i]].push_back(i);
    for (auto& [label, rows] : by) {
      shuffle(rows, rng);
      sequence.insert(sequence.end(), rows.begin(), rows.end());
    }
  } else {
    sequence.resize(y.size());
    std::iota(sequence.begin(), sequence.end(), std::size_t{0});
    shuffle(sequence, rng);
  }
  FoldAssignment folds;
  folds.k = k;
  folds.seed = seed;
  folds.stratified = stratified;
  folds.fold_of.assign(y.size(), 0);
  for (std::size_t pos = 0; pos < sequence.size(); ++pos) {
    folds.fold_of[sequence[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

std::string_view to_string(Averaging a) {
  switch (a) {
    case Averaging::binary: return "binary";
    case Averaging::macro: return "macro";
    case Averaging::weighted: return "weighted";
  }
  return "?";
}

Averaging averaging_from_string(std::string_view text) {
  if (text == "binary") return Averaging::binary;
  if (text == "macro") return Averaging::macro;
  if (text == "weighted") return Averaging::weighted;
  throw ConfigError("unknown F1 averaging '" + std::string(text) + "'");
}

double f1_score(const Labels& y_true, const Labels& y_pred, Averaging averaging) {
  if (y_true.size() != y_pred.size()) throw ConfigError("f1_score: length mismatch");
  if (y_true.empty()) throw ConfigError("f1_score: empty input");
  std::set<Label> labels(y_true.begin(), y_true.end());
  labels.insert(y_pred.begin(), y_pred.end());

  auto class_f1 = [&](Label c, std::size_t* support) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c, p = y_pred[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    if (support) *support = tp + fn;
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  };

  if (averaging == Averaging::binary) return class_f1(kPositiveLabel, nullptr);
  double sum = 0.0, weighted = 0.0;
  for (Label c : labels) {
    std::size_t support = 0;
    const double f = class_f1(c, &support);
    sum += f;
    weighted += f * static_cast<double>(support);
  }
  if (averaging == Averaging::macro) return sum / static_cast<double>(labels.size());
  return weighted / static_cast<double>(y_true.size());
}

namespace {

void add_note(std::vector<std::string>& notes, std::string note) {
  if (std::find(notes.begin(), notes.end(), note) == notes.end()) notes.push_back(std::move(note));
}

bool balanced(const Labels& y) {
  std::map<Label, std::size_t> counts;
  for (auto l : y) ++counts[l];
  std::set<std::size_t> distinct;
  for (const auto& [l, c] : counts) distinct.insert(c);
  return distinct.size() <= 1;
}

}  // namespace

CVResult cross_validate(const ClassifierSpec& spec, const FeatureMatrix& X, const Labels& y,
                        const FoldAssignment& folds, Averaging averaging, std::uint64_t seed) {
  validate(spec);
  if (X.rows() != y.size() || folds.fold_of.size() != y.size()) {
    throw ConfigError("cross_validate: matrix, labels and folds disagree in length");
  }
  const auto all_classes = distinct_labels(y);
  CVResult result;
  result.params = spec.params;
  result.seed = seed;
  result.averaging = averaging;

  for (int f = 0; f < folds.k; ++f) {
    FoldAudit audit;
    audit.training_rows = folds.training_rows(f);
    audit.validation_rows = folds.validation_rows(f);
    const auto& train = audit.training_rows;
    const std::string tag = "fold " + std::to_string(f) + ": ";
    if (audit.validation_rows.empty() || train.empty()) throw ConfigError(tag + "empty partition");

    FeatureMatrix scaled;
    if (needs_non_negative_inputs(spec.params)) {
      const auto mm = fit_min_max(X, train);
      audit.scaler_rows = mm.fitted_rows;
      scaled = apply_min_max(mm, X);
    } else {
      const auto sp = fit_scaler(X, train);
      audit.scaler_rows = sp.fitted_rows;
      for (const auto& c : sp.constant_columns()) add_note(result.notes, "constant column " + c + " centered only");
      scaled = apply_scaler(sp, X);
    }

    Matrix Xtr = take_rows(scaled.values, train);
    Labels ytr;
    for (auto r : train) ytr.push_back(y[r]);
    const auto present = distinct_labels(ytr);
    for (auto c : all_classes) {
      if (!std::binary_search(present.begin(), present.end(), c)) {
        add_note(result.notes, tag + "training rows lack class " + std::to_string(c));
      }
    }

    if (spec.oversampler != Oversampler::none) {
      if (present.size() < 2) {
        add_note(result.notes, tag + "single-class training rows, oversampling skipped");
      } else {
        const auto fold_seed = derive_seed(seed, static_cast<std::uint64_t>(f));
        Resampled rs;
        if (spec.oversampler == Oversampler::smote) {
          try {
            rs = smote(Xtr, ytr, spec.smote_k, fold_seed);
          } catch (const SmoteError& e) {
            add_note(result.notes, tag + e.what() + "; fell back to random oversampling");
            rs = random_oversample(Xtr, ytr, fold_seed);
          }
        } else {
          rs = random_oversample(Xtr, ytr, fold_seed);
        }
        for (auto& n : rs.notes) add_note(result.notes, n);
        for (const auto& o : rs.origin) {
          audit.resample_sources.push_back(train[o.seed_row]);
          audit.resample_sources.push_back(train[o.neighbor_row]);
        }
        Xtr = std::move(rs.X);
        ytr = std::move(rs.y);
      }
    }
    audit.training_size_after_resampling = ytr.size();
    audit.balanced = balanced(ytr);
    if (present.size() < 2) add_note(result.notes, tag + "single-class training rows, constant prediction");

    const auto model = fit_model(spec.params, Xtr, ytr);
    const Matrix Xval = take_rows(scaled.values, audit.validation_rows);
    Labels yval;
    for (auto r : audit.validation_rows) yval.push_back(y[r]);
    result.fold_f1.push_back(f1_score(yval, predict(model, Xval), averaging));
    result.audits.push_back(std::move(audit));
  }
  result.mean_f1 = mean(result.fold_f1);
  return result;
}

CVResult grid_search(const ClassifierSpec& spec, const FeatureMatrix& X, const Labels& y,
                     const FoldAssignment& folds, Averaging averaging, std::uint64_t seed) {
  if (!spec.tuned()) return cross_validate(spec, X, y, folds, averaging, seed);
  std::optional<CVResult> best;
  for (const auto& point : spec.grid) {
    ClassifierSpec s = spec;
    s.params = point;
    auto r = cross_validate(s, X, y, folds, averaging, seed);
    if (!best || r.mean_f1 > best->mean_f1) best = std::move(r);
  }
  best->evaluations = spec.grid.size();
  return *best;
}

bool audit_no_leakage(const CVResult& result) {
  for (const auto& a : result.audits) {
    const std::set<std::size_t> train(a.training_rows.begin(), a.training_rows.end());
    for (auto v : a.validation_rows) {
      if (train.count(v)) return false;
    }
    for (auto r : a.scaler_rows) {
      if (!train.count(r)) return false;
    }
    for (auto r : a.resample_sources) {
      if (!train.count(r)) return false;
    }
  }
  return true;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) throw ConfigError("mean of an empty list");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) throw ConfigError("sample SD needs at least 2 values");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

GroupStats group_stats(const Matrix& f1, const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(f1.cols()) != names.size()) throw ConfigError("group_stats: name count mismatch");
  GroupStats stats;
  for (Eigen::Index j = 0; j < f1.cols(); ++j) {
    std::vector<double> col;
    for (Eigen::Index i = 0; i < f1.rows(); ++i) {
      if (!std::isnan(f1(i, j))) col.push_back(f1(i, j));
    }
    if (col.empty()) throw ConfigError("group_stats: column " + names[static_cast<std::size_t>(j)] + " is empty");
    stats.groups.push_back(
        {names[static_cast<std::size_t>(j)], col.size(), mean(col), col.size() > 1 ? sample_sd(col) : 0.0});
  }
  return stats;
}

}  // namespace ppui
