#include "ppui/tree.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

namespace ppui {

namespace {

std::size_t total(std::span<const std::size_t> counts) {
  const auto n = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  if (n == 0) throw ConfigError("impurity of an empty node is undefined");
  return n;
}

}  // namespace

double entropy(std::span<const std::size_t> counts) {
  const double n = static_cast<double>(total(counts));
  double e = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    e -= p * std::log2(p);
  }
  return e == 0.0 ? 0.0 : e;  // no -0.0
}

double gini(std::span<const std::size_t> counts) {
  const double n = static_cast<double>(total(counts));
  double s = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / n;
    s += p * p;
  }
  return 1.0 - s;
}

double impurity(Criterion criterion, std::span<const std::size_t> counts) {
  return criterion == Criterion::gini ? gini(counts) : entropy(counts);
}

namespace {

struct Encoded {
  Labels classes;
  std::vector<std::size_t> idx;  // class slot per row
};

Encoded encode_labels(const Labels& y) {
  Encoded e;
  e.classes = distinct_labels(y);
  e.idx.reserve(y.size());
  for (auto l : y) {
    e.idx.push_back(static_cast<std::size_t>(std::lower_bound(e.classes.begin(), e.classes.end(), l) -
                                              e.classes.begin()));
  }
  return e;
}

double split_gain(Criterion criterion, double parent, std::span<const std::size_t> left,
                  std::span<const std::size_t> right, std::size_t n_left, std::size_t n_right, double* after) {
  const double n = static_cast<double>(n_left + n_right);
  const double weighted = static_cast<double>(n_left) / n * impurity(criterion, left) +
                          static_cast<double>(n_right) / n * impurity(criterion, right);
  if (after) *after = weighted;
  return parent - weighted;
}

/// Exhaustive midpoint search restricted to `rows`.
/// With `zero_gain_fallback`, an impure node with no positive-gain candidate
/// takes its first candidate instead.
std::optional<Split> search_midpoints(const Matrix& X, const std::vector<std::size_t>& cls, std::size_t n_classes,
                                      const std::vector<std::size_t>& rows, Criterion criterion,
                                      bool zero_gain_fallback = false) {
  std::vector<std::size_t> parent(n_classes, 0);
  for (auto r : rows) ++parent[cls[r]];
  const double parent_imp = impurity(criterion, parent);
  if (parent_imp == 0.0) return std::nullopt;

  std::optional<Split> best, first;
  std::vector<std::size_t> order(rows);
  std::vector<std::size_t> left(n_classes), right(n_classes);
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return X(static_cast<Eigen::Index>(a), j) < X(static_cast<Eigen::Index>(b), j);
    });
    std::fill(left.begin(), left.end(), 0);
    right = parent;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const auto c = cls[order[i]];
      ++left[c];
      --right[c];
      const double lo = X(static_cast<Eigen::Index>(order[i]), j);
      const double hi = X(static_cast<Eigen::Index>(order[i + 1]), j);
      if (!(hi > lo)) continue;
      double threshold = lo + (hi - lo) / 2.0;
      if (threshold >= hi) threshold = lo;
      double after = 0.0;
      const double gain = split_gain(criterion, parent_imp, left, right, i + 1, order.size() - i - 1, &after);
      if (!first) first = Split{static_cast<std::size_t>(j), threshold, parent_imp, after, std::max(gain, 0.0)};
      if (gain > kGainTolerance && (!best || gain > best->gain + kGainTolerance)) {
        best = Split{static_cast<std::size_t>(j), threshold, parent_imp, after, gain};
      }
    }
  }
  return best || !zero_gain_fallback ? best : first;
}

using SplitFinder = std::function<std::optional<Split>(const std::vector<std::size_t>& rows)>;

/// Greedy recursive growth; returns the per-feature accumulated n_node * gain.
TreeModel grow(const Matrix& X, const Encoded& enc, const TreeParams& params, const SplitFinder& find,
               Vector* importance) {
  if (X.rows() == 0) throw ConfigError("cannot fit a tree on an empty dataset");
  if (params.min_samples_split < 2) throw ConfigError("min_samples_split must be at least 2");
  if (params.max_depth && *params.max_depth < 0) throw ConfigError("max_depth must be non-negative");
  TreeModel model;
  model.classes = enc.classes;
  model.params = params;
  model.features = static_cast<std::size_t>(X.cols());

  struct Pending {
    int node;
    std::vector<std::size_t> rows;
  };
  std::vector<std::size_t> all(static_cast<std::size_t>(X.rows()));
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Pending> stack;
  model.nodes.emplace_back();
  stack.push_back({0, std::move(all)});

  while (!stack.empty()) {
    Pending p = std::move(stack.back());
    stack.pop_back();
    TreeNode& node = model.nodes[static_cast<std::size_t>(p.node)];
    node.samples = p.rows.size();
    node.counts.assign(enc.classes.size(), 0);
    for (auto r : p.rows) ++node.counts[enc.idx[r]];
    node.label = enc.classes[static_cast<std::size_t>(
        std::max_element(node.counts.begin(), node.counts.end()) - node.counts.begin())];

    const bool pure = std::count_if(node.counts.begin(), node.counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_ok = !params.max_depth || node.depth < *params.max_depth;
    const bool size_ok = p.rows.size() >= static_cast<std::size_t>(params.min_samples_split);
    if (pure || !depth_ok || !size_ok) continue;

    auto split = find(p.rows);
    if (!split) continue;

    std::vector<std::size_t> lrows, rrows;
    for (auto r : p.rows) {
      (X(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(split->feature)) <= split->threshold ? lrows : rrows)
          .push_back(r);
    }
    if (lrows.empty() || rrows.empty()) continue;
    if (importance) {
      (*importance)(static_cast<Eigen::Index>(split->feature)) += static_cast<double>(p.rows.size()) * split->gain;
    }

    const int depth = node.depth;
    node.split = split;
    const int left = static_cast<int>(model.nodes.size());
    model.nodes[static_cast<std::size_t>(p.node)].left = left;
    model.nodes[static_cast<std::size_t>(p.node)].right = left + 1;
    model.nodes.emplace_back();
    model.nodes.emplace_back();
    model.nodes[static_cast<std::size_t>(left)].depth = depth + 1;
    model.nodes[static_cast<std::size_t>(left) + 1].depth = depth + 1;
    stack.push_back({left + 1, std::move(rrows)});
    stack.push_back({left, std::move(lrows)});
  }
  return model;
}

}  // namespace

std::optional<Split> best_split(const Matrix& X, const Labels& y, Criterion criterion) {
  if (X.cols() == 0) throw ConfigError("best_split on a zero-width matrix");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("row count and label count differ");
  if (X.rows() < 2) return std::nullopt;
  const auto enc = encode_labels(y);
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return search_midpoints(X, enc.idx, enc.classes.size(), rows, criterion);
}

TreeModel fit_tree(const Matrix& X, const Labels& y, const TreeParams& params) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("row count and label count differ");
  if (!X.allFinite()) throw DataError("training matrix contains non-finite values");
  const auto enc = encode_labels(y);
  SplitFinder find = [&](const std::vector<std::size_t>& rows) {
    if (X.cols() == 0) return std::optional<Split>{};
    return search_midpoints(X, enc.idx, enc.classes.size(), rows, params.criterion, true);
  };
  return grow(X, enc, params, find, nullptr);
}

Label predict_tree(const TreeModel& model, const Eigen::Ref<const RowVector>& x) {
  if (static_cast<std::size_t>(x.size()) != model.features) throw ConfigError("row width does not match the model");
  if (!x.allFinite()) throw DataError("prediction input contains non-finite values");
  std::size_t i = 0;
  while (!model.nodes[i].leaf()) {
    const auto& s = *model.nodes[i].split;
    i = static_cast<std::size_t>(x(static_cast<Eigen::Index>(s.feature)) <= s.threshold ? model.nodes[i].left
                                                                                          : model.nodes[i].right);
  }
  return model.nodes[i].label;
}

int TreeModel::depth() const {
  int d = 0;
  for (const auto& n : nodes) d = std::max(d, n.depth);
  return d;
}

std::size_t TreeModel::leaves() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.leaf(); }));
}

std::string render_tree(const TreeModel& model, const std::vector<std::string>& feature_names) {
  std::ostringstream os;
  std::function<void(int, int)> walk = [&](int i, int indent) {
    const auto& n = model.nodes[static_cast<std::size_t>(i)];
    os << std::string(static_cast<std::size_t>(indent) * 2, ' ');
    if (n.leaf()) {
      os << "leaf label=" << n.label << " samples=" << n.samples << '\n';
      return;
    }
    const auto f = n.split->feature;
    const std::string name = f < feature_names.size() ? feature_names[f] : "x[" + std::to_string(f) + "]";
    os << name << " <= " << n.split->threshold << " (samples=" << n.samples << ", gain=" << n.split->gain << ")\n";
    walk(n.left, indent + 1);
    walk(n.right, indent + 1);
  };
  walk(0, 0);
  return os.str();
}

Vector randomized_importance(const Matrix& X, const Labels& y, int n_trees, std::uint64_t seed) {
  if (n_trees < 1) throw ConfigError("n_trees must be at least 1");
  if (X.rows() < 2) throw ConfigError("randomized importance needs at least 2 rows");
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("row count and label count differ");
  const auto enc = encode_labels(y);
  const std::size_t k = enc.classes.size();
  Vector sum = Vector::Zero(X.cols());

  for (int t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    SplitFinder find = [&](const std::vector<std::size_t>& rows) {
      std::vector<std::size_t> parent(k, 0);
      for (auto r : rows) ++parent[enc.idx[r]];
      const double parent_imp = gini(parent);
      std::optional<Split> best;
      std::vector<std::size_t> left(k), right(k);
      for (Eigen::Index j = 0; j < X.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (auto r : rows) {
          lo = std::min(lo, X(static_cast<Eigen::Index>(r), j));
          hi = std::max(hi, X(static_cast<Eigen::Index>(r), j));
        }
        if (!(hi > lo)) continue;
        const double threshold = lo + uniform01(rng) * (hi - lo);
        std::fill(left.begin(), left.end(), 0);
        std::size_t n_left = 0;
        for (auto r : rows) {
          if (X(static_cast<Eigen::Index>(r), j) <= threshold) {
            ++left[enc.idx[r]];
            ++n_left;
          }
        }
        for (std::size_t c = 0; c < k; ++c) right[c] = parent[c] - left[c];
        double after = 0.0;
        const double gain = split_gain(Criterion::gini, parent_imp, left, right, n_left, rows.size() - n_left, &after);
        if (gain > kGainTolerance && (!best || gain > best->gain)) {
          best = Split{static_cast<std::size_t>(j), threshold, parent_imp, after, gain};
        }
      }
      return best;
    };
    Vector imp = Vector::Zero(X.cols());
    grow(X, enc, TreeParams{}, find, &imp);
    if (imp.sum() > 0.0) sum += imp / imp.sum();
  }
  if (sum.sum() > 0.0) sum /= sum.sum();
  return sum;
}

}  // namespace ppui
