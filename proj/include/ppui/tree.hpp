#pragma once

// Decision trees with Gini / entropy impurity, plus a randomized-threshold
// ensemble for feature importance.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppui/common.hpp"

namespace ppui {

enum class Criterion { gini, entropy };

/// Shannon entropy in bits, 0 log 0 := 0. Throws ConfigError on all-zero counts.
double entropy(std::span<const std::size_t> counts);
/// 1 - sum p_i^2. Throws ConfigError on all-zero counts.
double gini(std::span<const std::size_t> counts);
double impurity(Criterion criterion, std::span<const std::size_t> counts);

/// Gains within this margin count as ties; a split needs gain above it.
inline constexpr double kGainTolerance = 1e-12;

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;  // rows with x <= threshold go left
  double impurity_before = 0.0;
  double impurity_after = 0.0;  // child-size-weighted
  double gain = 0.0;
};

/// Exhaustive search over midpoints between consecutive distinct values of
/// every feature. Ties go to the lowest feature, then the lowest threshold.
std::optional<Split> best_split(const Matrix& X, const Labels& y, Criterion criterion);

struct TreeParams {
  Criterion criterion = Criterion::gini;
  std::optional<int> max_depth;  // nullopt: unlimited
  int min_samples_split = 2;

  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct TreeNode {
  std::vector<std::size_t> counts;  // per class, aligned with TreeModel::classes
  Label label = 0;
  int depth = 0;
  std::size_t samples = 0;
  std::optional<Split> split;
  int left = -1;
  int right = -1;

  bool leaf() const { return !split.has_value(); }
};

struct TreeModel {
  Labels classes;
  TreeParams params;
  std::size_t features = 0;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  int depth() const;
  std::size_t leaves() const;
};

/// Impure nodes with no positive-gain split still split on their first
/// candidate, so gains along a path may be zero.
TreeModel fit_tree(const Matrix& X, const Labels& y, const TreeParams& params = {});
Label predict_tree(const TreeModel& model, const Eigen::Ref<const RowVector>& x);
/// Indented node dump.
std::string render_tree(const TreeModel& model, const std::vector<std::string>& feature_names = {});

/// Mean impurity-decrease importance over `n_trees` extremely randomized trees
/// (Gini, one uniform random threshold per feature per node). Sums to 1 when
/// any split occurred.
Vector randomized_importance(const Matrix& X, const Labels& y, int n_trees, std::uint64_t seed);

}  // namespace ppui
