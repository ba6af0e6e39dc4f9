#pragma once

// Evaluation protocol: folds, F1, cross-validation with in-fold scaling and
// oversampling, grid search, t-tests and per-group summary statistics.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppui/classifier.hpp"
#include "ppui/tabular.hpp"

namespace ppui {

struct FoldAssignment {
  std::vector<int> fold_of;  // per row, in [0, k)
  int k = 0;
  std::uint64_t seed = 0;
  bool stratified = true;

  std::vector<std::size_t> validation_rows(int fold) const;
  std::vector<std::size_t> training_rows(int fold) const;
  std::vector<std::size_t> fold_sizes() const;
};

/// Shuffled k-fold partition. Stratified folds deal each class round-robin so
/// per-class fold counts differ by at most one.
FoldAssignment make_folds(const Labels& y, int k, std::uint64_t seed, bool stratified = true);

enum class Averaging { binary, macro, weighted };
std::string_view to_string(Averaging a);
Averaging averaging_from_string(std::string_view text);

/// Positive class for binary averaging.
inline constexpr Label kPositiveLabel = 1;

/// Per-class F1 with 0/0 := 0, over the union of labels seen in either input.
double f1_score(const Labels& y_true, const Labels& y_pred, Averaging averaging);

/// Provenance of one cross-validation fold, for leakage audits. All indices
/// are rows of the matrix given to cross_validate.
struct FoldAudit {
  std::vector<std::size_t> training_rows;
  std::vector<std::size_t> validation_rows;
  std::vector<std::size_t> scaler_rows;
  /// Seed and neighbor rows of every appended oversampled row.
  std::vector<std::size_t> resample_sources;
  std::size_t training_size_after_resampling = 0;
  bool balanced = false;  // class counts equal after oversampling
};

struct CVResult {
  std::vector<double> fold_f1;
  double mean_f1 = 0.0;
  ModelParams params;
  std::uint64_t seed = 0;
  Averaging averaging = Averaging::weighted;
  std::vector<std::string> notes;
  std::vector<FoldAudit> audits;
  /// Grid points evaluated (1 for untuned specs).
  std::size_t evaluations = 1;
};

/// Runs spec.params through every fold: scaler fitted on training rows only,
/// oversampling on training rows only, F1 on the validation rows.
CVResult cross_validate(const ClassifierSpec& spec, const FeatureMatrix& X, const Labels& y,
                        const FoldAssignment& folds, Averaging averaging, std::uint64_t seed);

/// Evaluates every grid point on the same folds and returns the winner's
/// result; ties keep the earliest point. Untuned specs run once.
CVResult grid_search(const ClassifierSpec& spec, const FeatureMatrix& X, const Labels& y,
                     const FoldAssignment& folds, Averaging averaging, std::uint64_t seed);

/// True when no validation row fed scaler fitting or oversampling in any fold.
bool audit_no_leakage(const CVResult& result);

enum class TTestKind { paired, pooled, welch };
std::string_view to_string(TTestKind k);

struct TTestResult {
  TTestKind kind = TTestKind::paired;
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;  // two-sided
  std::size_t n_a = 0, n_b = 0;
  double mean_a = 0.0, sd_a = 0.0;
  double mean_b = 0.0, sd_b = 0.0;
};

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
/// Student t CDF with df degrees of freedom.
double student_t_cdf(double t, double df);

/// Throws ConfigError for too-short inputs or zero variance.
TTestResult t_test(const std::vector<double>& a, const std::vector<double>& b, TTestKind kind);

double mean(const std::vector<double>& v);
/// n - 1 denominator.
double sample_sd(const std::vector<double>& v);

struct GroupStats {
  struct Entry {
    std::string name;
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
  };
  std::vector<Entry> groups;
};

/// Column means and SDs of a runs x groups F1 matrix; NaN cells are skipped.
GroupStats group_stats(const Matrix& f1, const std::vector<std::string>& names);

}  // namespace ppui
