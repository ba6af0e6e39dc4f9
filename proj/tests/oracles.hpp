#pragma once

// Test-side reference implementations. Deliberately written against plain
// std::vector rows, without Eigen or any library helper, so a shared bug
// cannot hide in both sides of a comparison.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "ppui/common.hpp"

namespace oracle {

using Rows = std::vector<std::vector<double>>;
using Ints = std::vector<int>;

inline ppui::Matrix to_matrix(const Rows& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = rows.empty() ? Eigen::Index{0} : static_cast<Eigen::Index>(rows[0].size());
  ppui::Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  return m;
}

inline ppui::RowVector to_row(const std::vector<double>& v) {
  ppui::RowVector r(static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < v.size(); ++j) r(static_cast<Eigen::Index>(j)) = v[j];
  return r;
}

inline Ints classes_of(const Ints& y) {
  std::set<int> s(y.begin(), y.end());
  return {s.begin(), s.end()};
}

// ---- Gaussian NB, direct products without logs ----

struct GnbOracle {
  Ints classes;
  std::vector<double> posterior;  // normalized; empty when every product underflowed
  int label = 0;
};

inline double normal_density(double x, double mu, double sigma) {
  const double pi = 3.14159265358979323846;
  return 1.0 / std::sqrt(2.0 * pi * sigma * sigma) * std::exp(-((x - mu) * (x - mu)) / (2.0 * sigma * sigma));
}

inline GnbOracle gaussian_nb(const Rows& X, const Ints& y, const std::vector<double>& x) {
  GnbOracle out;
  out.classes = classes_of(y);
  const std::size_t n = X.size(), d = X[0].size();
  double max_var = 0.0;
  for (std::size_t j = 0; j < d && n > 1; ++j) {
    double s = 0.0, ss = 0.0;
    for (const auto& r : X) s += r[j];
    const double m = s / static_cast<double>(n);
    for (const auto& r : X) ss += (r[j] - m) * (r[j] - m);
    max_var = std::max(max_var, ss / static_cast<double>(n - 1));
  }
  const double eps = 1e-9 * (max_var > 0.0 ? max_var : 1.0);
  std::vector<double> joint;
  for (int c : out.classes) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] == c) rows.push_back(i);
    }
    double p = static_cast<double>(rows.size()) / static_cast<double>(n);
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (auto i : rows) s += X[i][j];
      const double mu = s / static_cast<double>(rows.size());
      double sigma = std::sqrt(eps);
      if (rows.size() > 1) {
        double ss = 0.0;
        for (auto i : rows) ss += (X[i][j] - mu) * (X[i][j] - mu);
        sigma = std::max(std::sqrt(ss / static_cast<double>(rows.size() - 1)), std::sqrt(eps));
      }
      p *= normal_density(x[j], mu, sigma);
    }
    joint.push_back(p);
  }
  double total = 0.0;
  for (double p : joint) total += p;
  std::size_t best = 0;
  for (std::size_t c = 1; c < joint.size(); ++c) {
    if (joint[c] > joint[best]) best = c;
  }
  out.label = out.classes[best];
  if (total > 0.0) {
    for (double p : joint) out.posterior.push_back(p / total);
  }
  return out;
}

// ---- Complement NB by counting complements sample by sample ----

inline std::vector<double> complement_scores(const Rows& X, const Ints& y, double alpha, const std::vector<double>& x) {
  const auto classes = classes_of(y);
  const std::size_t d = X[0].size();
  std::vector<double> scores;
  for (int c : classes) {
    std::vector<double> counts(d, alpha);
    for (std::size_t i = 0; i < X.size(); ++i) {
      if (y[i] == c) continue;
      for (std::size_t j = 0; j < d; ++j) counts[j] += X[i][j];
    }
    double total = 0.0;
    for (double v : counts) total += v;
    std::vector<double> w(d);
    double abs_sum = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      w[j] = std::log(counts[j] / total);
      abs_sum += std::fabs(w[j]);
    }
    double s = 0.0;
    if (abs_sum > 0.0) {
      for (std::size_t j = 0; j < d; ++j) s += x[j] * (w[j] / abs_sum);
    }
    scores.push_back(s);
  }
  return scores;
}

inline int complement_nb_label(const Rows& X, const Ints& y, double alpha, const std::vector<double>& x) {
  const auto classes = classes_of(y);
  const auto s = complement_scores(X, y, alpha, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < s.size(); ++c) {
    if (s[c] < s[best]) best = c;
  }
  return classes[best];
}

// ---- KNN by sorting every distance ----

struct KnnOracle {
  std::vector<std::size_t> neighbors;
  Ints classes;
  std::vector<double> probabilities;
  int label = 0;
};

inline KnnOracle knn(const Rows& X, const Ints& y, const std::vector<double>& x, std::size_t k, bool inverse_distance) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (X[i][j] - x[j]) * (X[i][j] - x[j]);
    all.emplace_back(std::sqrt(s), i);
  }
  std::sort(all.begin(), all.end());
  KnnOracle out;
  out.classes = classes_of(y);
  out.probabilities.assign(out.classes.size(), 0.0);
  bool exact = false;
  for (std::size_t r = 0; r < k; ++r) {
    out.neighbors.push_back(all[r].second);
    exact |= all[r].first == 0.0;
  }
  double total = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    double w = 1.0;
    if (inverse_distance) w = exact ? (all[r].first == 0.0 ? 1.0 : 0.0) : 1.0 / (all[r].first + 1e-12);
    const auto c = static_cast<std::size_t>(
        std::find(out.classes.begin(), out.classes.end(), y[all[r].second]) - out.classes.begin());
    out.probabilities[c] += w;
    total += w;
  }
  for (auto& p : out.probabilities) p /= total;
  std::size_t best = 0;
  for (std::size_t c = 1; c < out.probabilities.size(); ++c) {
    if (out.probabilities[c] > out.probabilities[best]) best = c;
  }
  out.label = out.classes[best];
  return out;
}

// ---- Split search over every (feature, midpoint) ----

inline double gini_of(const std::map<int, double>& counts) {
  double n = 0.0, s = 0.0;
  for (const auto& [c, v] : counts) n += v;
  for (const auto& [c, v] : counts) s += (v / n) * (v / n);
  return 1.0 - s;
}

inline double entropy_of(const std::map<int, double>& counts) {
  double n = 0.0, h = 0.0;
  for (const auto& [c, v] : counts) n += v;
  for (const auto& [c, v] : counts) {
    if (v > 0.0) h -= (v / n) * std::log2(v / n);
  }
  return h;
}

struct SplitOracle {
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;
};

inline std::optional<SplitOracle> best_split(const Rows& X, const Ints& y, bool use_entropy) {
  auto imp = [&](const std::map<int, double>& c) { return use_entropy ? entropy_of(c) : gini_of(c); };
  std::map<int, double> parent;
  for (int l : y) parent[l] += 1.0;
  const double before = imp(parent);
  const double n = static_cast<double>(y.size());
  std::optional<SplitOracle> best;
  for (std::size_t j = 0; j < X[0].size(); ++j) {
    std::set<double> values;
    for (const auto& r : X) values.insert(r[j]);
    std::vector<double> v(values.begin(), values.end());
    for (std::size_t t = 0; t + 1 < v.size(); ++t) {
      const double threshold = (v[t] + v[t + 1]) / 2.0;
      std::map<int, double> left, right;
      for (std::size_t i = 0; i < y.size(); ++i) (X[i][j] <= threshold ? left : right)[y[i]] += 1.0;
      double nl = 0.0, nr = 0.0;
      for (const auto& [c, k] : left) nl += k;
      for (const auto& [c, k] : right) nr += k;
      const double gain = before - (nl / n) * imp(left) - (nr / n) * imp(right);
      if (gain > 1e-12 && (!best || gain > best->gain + 1e-12)) best = SplitOracle{j, threshold, gain};
    }
  }
  return best;
}

// ---- F1 from an explicit confusion matrix ----

/// confusion[t][p] = count of true class t predicted as p.
inline std::vector<double> per_class_f1(const std::vector<std::vector<double>>& confusion) {
  const std::size_t k = confusion.size();
  std::vector<double> f1(k);
  for (std::size_t c = 0; c < k; ++c) {
    double tp = confusion[c][c], fp = 0.0, fn = 0.0;
    for (std::size_t o = 0; o < k; ++o) {
      if (o == c) continue;
      fp += confusion[o][c];
      fn += confusion[c][o];
    }
    const double p = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double r = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    f1[c] = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return f1;
}

/// Expands a confusion matrix into label vectors (classes 0..k-1).
inline std::pair<ppui::Labels, ppui::Labels> expand(const std::vector<std::vector<int>>& confusion) {
  ppui::Labels t, p;
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    for (std::size_t j = 0; j < confusion[i].size(); ++j) {
      for (int c = 0; c < confusion[i][j]; ++c) {
        t.push_back(static_cast<int>(i));
        p.push_back(static_cast<int>(j));
      }
    }
  }
  return {t, p};
}

// ---- Paired t from running sums, the way a spreadsheet would ----

inline double paired_t(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0, s2 = 0.0;
  const double n = static_cast<double>(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d;
    s2 += d * d;
  }
  const double var = (s2 - s * s / n) / (n - 1.0);
  return (s / n) / std::sqrt(var / n);
}

// ---- Random instance generation ----

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

  Rows rows(std::size_t n, std::size_t d, double lo, double hi) {
    Rows X(n, std::vector<double>(d));
    for (auto& r : X) {
      for (auto& v : r) v = real(lo, hi);
    }
    return X;
  }
  Rows grid_rows(std::size_t n, std::size_t d, int lo, int hi) {
    Rows X(n, std::vector<double>(d));
    for (auto& r : X) {
      for (auto& v : r) v = integer(lo, hi);
    }
    return X;
  }
  /// Labels in [0, classes) with every class present at least `min_each` times.
  Ints labels(std::size_t n, int classes, std::size_t min_each = 1) {
    Ints y;
    for (int c = 0; c < classes; ++c) {
      for (std::size_t i = 0; i < min_each; ++i) y.push_back(c);
    }
    while (y.size() < n) y.push_back(integer(0, classes - 1));
    std::shuffle(y.begin(), y.end(), rng);
    return y;
  }
};

}  // namespace oracle
