#include "ppui/resample.hpp"

#include <algorithm>

#include "ppui/neighbors.hpp"

namespace ppui {

namespace {

struct ClassRows {
  Label label;
  std::vector<std::size_t> rows;
};

std::vector<ClassRows> group_rows(const Matrix& X, const Labels& y) {
  if (static_cast<std::size_t>(X.rows()) != y.size()) throw ConfigError("row count and label count differ");
  std::map<Label, std::vector<std::size_t>> by;
  for (std::size_t i = 0; i < y.size(); ++i) by[y[i]].push_back(i);
  if (by.size() < 2) throw ConfigError("oversampling needs at least two classes");
  std::vector<ClassRows> out;
  for (auto& [l, rows] : by) out.push_back({l, std::move(rows)});
  return out;
}

ResamplePlan make_plan(const std::vector<ClassRows>& groups, std::uint64_t seed) {
  std::size_t majority = 0;
  for (const auto& g : groups) majority = std::max(majority, g.rows.size());
  ResamplePlan plan;
  plan.seed = seed;
  for (const auto& g : groups) plan.classes.push_back({g.label, g.rows.size(), majority});
  return plan;
}

Resampled assemble(const Matrix& X, const Labels& y, std::vector<RowVector> extra_rows, Labels extra_labels,
                   std::vector<SyntheticOrigin> origin, ResamplePlan plan) {
  Resampled out;
  out.X.resize(X.rows() + static_cast<Eigen::Index>(extra_rows.size()), X.cols());
  out.X.topRows(X.rows()) = X;
  for (std::size_t i = 0; i < extra_rows.size(); ++i) {
    out.X.row(X.rows() + static_cast<Eigen::Index>(i)) = extra_rows[i];
  }
  out.y = y;
  out.y.insert(out.y.end(), extra_labels.begin(), extra_labels.end());
  out.origin = std::move(origin);
  out.plan = std::move(plan);
  return out;
}

}  // namespace

Resampled random_oversample(const Matrix& X, const Labels& y, std::uint64_t seed) {
  const auto groups = group_rows(X, y);
  auto plan = make_plan(groups, seed);
  Rng rng(seed);
  std::vector<RowVector> rows;
  Labels labels;
  std::vector<SyntheticOrigin> origin;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g].rows;
    for (std::size_t n = members.size(); n < plan.classes[g].target; ++n) {
      const auto src = members[uniform_index(rng, members.size())];
      rows.push_back(X.row(static_cast<Eigen::Index>(src)));
      labels.push_back(groups[g].label);
      origin.push_back({src, src, 0.0});
    }
  }
  return assemble(X, y, std::move(rows), std::move(labels), std::move(origin), std::move(plan));
}

Resampled smote(const Matrix& X, const Labels& y, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("SMOTE k must be at least 1");
  const auto groups = group_rows(X, y);
  auto plan = make_plan(groups, seed);
  Rng rng(seed);
  std::vector<RowVector> rows;
  Labels labels;
  std::vector<SyntheticOrigin> origin;
  std::vector<std::string> notes;

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& members = groups[g].rows;
    const std::size_t needed = plan.classes[g].target - members.size();
    if (needed == 0) continue;
    if (members.size() < 2) {
      throw SmoteError("SMOTE: class " + std::to_string(groups[g].label) + " has a single row");
    }
    const std::size_t k_eff = std::min<std::size_t>(static_cast<std::size_t>(k), members.size() - 1);
    if (k_eff < static_cast<std::size_t>(k)) {
      notes.push_back("SMOTE: k clamped to " + std::to_string(k_eff) + " for class " +
                      std::to_string(groups[g].label));
    }
    const Matrix cls = take_rows(X, members);
    // neighbor lists, self excluded (it is always first at distance 0 with
    // the lowest index among exact duplicates of itself)
    std::vector<std::vector<std::size_t>> neigh(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      auto nn = nearest_neighbors(cls, cls.row(static_cast<Eigen::Index>(i)), members.size());
      nn.erase(std::find(nn.begin(), nn.end(), i));
      nn.resize(k_eff);
      neigh[i] = std::move(nn);
    }
    for (std::size_t s = 0; s < needed; ++s) {
      const auto i = uniform_index(rng, members.size());
      const auto j = neigh[i][uniform_index(rng, k_eff)];
      const double lambda = uniform01(rng);
      const RowVector a = cls.row(static_cast<Eigen::Index>(i));
      const RowVector b = cls.row(static_cast<Eigen::Index>(j));
      rows.push_back(a + lambda * (b - a));
      labels.push_back(groups[g].label);
      origin.push_back({members[i], members[j], lambda});
    }
  }
  auto out = assemble(X, y, std::move(rows), std::move(labels), std::move(origin), std::move(plan));
  out.notes = std::move(notes);
  return out;
}

}  // namespace ppui
