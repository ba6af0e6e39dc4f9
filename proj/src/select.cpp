#include "ppui/select.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace ppui {

double anova_f_score(const Eigen::Ref<const Vector>& feature, const Labels& y) {
  if (static_cast<std::size_t>(feature.size()) != y.size()) throw ConfigError("feature and label lengths differ");
  std::map<Label, std::pair<double, std::size_t>> groups;  // sum, count
  for (std::size_t i = 0; i < y.size(); ++i) {
    auto& g = groups[y[i]];
    g.first += feature(static_cast<Eigen::Index>(i));
    ++g.second;
  }
  const std::size_t k = groups.size();
  const std::size_t n = y.size();
  if (k < 2) throw ConfigError("ANOVA F needs at least two classes");
  if (n <= k) throw ConfigError("ANOVA F needs more samples than classes");
  const double grand = feature.mean();
  double between = 0.0;
  for (const auto& [label, g] : groups) {
    const double m = g.first / static_cast<double>(g.second);
    between += static_cast<double>(g.second) * (m - grand) * (m - grand);
  }
  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& g = groups[y[i]];
    const double d = feature(static_cast<Eigen::Index>(i)) - g.first / static_cast<double>(g.second);
    within += d * d;
  }
  const double ms_between = between / static_cast<double>(k - 1);
  const double ms_within = within / static_cast<double>(n - k);
  // relative guard: sums of squares at rounding level count as zero
  const double scale = std::max(1.0, (feature.array() - grand).square().sum());
  if (between <= 1e-12 * scale) return 0.0;
  if (within <= 1e-12 * scale) return std::numeric_limits<double>::infinity();
  return ms_between / ms_within;
}

std::vector<std::string> select_k_best(const FeatureMatrix& X, const Labels& y, int k, const FeatureScorer& scorer) {
  if (k <= 0) throw ConfigError("select_k_best: k must be positive");
  if (static_cast<std::size_t>(k) > X.cols()) throw ConfigError("select_k_best: k exceeds the feature count");
  std::vector<double> scores(X.cols());
  for (std::size_t j = 0; j < X.cols(); ++j) scores[j] = scorer(X.values.col(static_cast<Eigen::Index>(j)), y);
  std::vector<std::size_t> order(X.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::string> out;
  for (int i = 0; i < k; ++i) out.push_back(X.columns[order[static_cast<std::size_t>(i)]].source);
  return out;
}

std::string_view to_string(GroupName g) {
  switch (g) {
    case GroupName::intrinsic: return "intrinsic";
    case GroupName::intrinsic_best: return "intrinsic_best";
    case GroupName::extrinsic: return "extrinsic";
    case GroupName::extrinsic_best: return "extrinsic_best";
    case GroupName::all: return "all";
    case GroupName::best_of_all: return "best_of_all";
  }
  return "?";
}

std::string_view heading(GroupName g) {
  switch (g) {
    case GroupName::intrinsic: return "Int.";
    case GroupName::intrinsic_best: return "Int. best";
    case GroupName::extrinsic: return "Ext.";
    case GroupName::extrinsic_best: return "Ext. best";
    case GroupName::all: return "All";
    case GroupName::best_of_all: return "Best of all";
  }
  return "?";
}

GroupName group_from_string(std::string_view text) {
  for (auto g : kGroupOrder) {
    if (to_string(g) == text) return g;
  }
  throw ConfigError("unknown feature group '" + std::string(text) + "'");
}

std::string_view to_string(GroupProvenance p) {
  switch (p) {
    case GroupProvenance::schema: return "schema-derived";
    case GroupProvenance::published: return "table4-fixed";
    case GroupProvenance::data_driven: return "data-driven";
  }
  return "?";
}

GroupMode group_mode_from_string(std::string_view text) {
  if (text == "replication") return GroupMode::replication;
  if (text == "data-driven") return GroupMode::data_driven;
  throw ConfigError("unknown group mode '" + std::string(text) + "'");
}

std::string_view to_string(GroupMode m) { return m == GroupMode::replication ? "replication" : "data-driven"; }

std::optional<std::string> canonical_name(std::string_view token, const Schema& schema) {
  static const std::map<std::string_view, std::string_view> aliases = {
      {"TYPE_PARTO", "TYPE_LABOUR"}, {"EPISIOTOM", "EPISIOTOMY"}, {"AQUAGY", "AQUAGYM"}};
  std::string name(token);
  if (auto it = aliases.find(token); it != aliases.end()) name = it->second;
  if (!schema.find(name)) return std::nullopt;
  return name;
}

namespace {

struct PublishedBest {
  std::array<std::string_view, 3> intrinsic;
  std::array<std::string_view, 3> extrinsic;
  std::array<std::string_view, 3> overall;
};

// Best-variable triples as printed, misspellings included.
const PublishedBest& published_best(std::string_view target) {
  static const PublishedBest ui{{"KRISTELLER", "DIC_NULLIPAROUS", "NUM_LABOURS"},
                                {"AQUAGYM", "GROUP", "WEIGHT"},
                                {"AQUAGYM", "KRISTELLER", "DIC_NULLIPAROUS"}};
  static const PublishedBest stress{{"KRISTELLER", "DIC_NULLIPAROUS", "NUM_LABOURS"},
                                    {"AQUAGYM", "FREQ_PAPREV", "IPAQ"},
                                    {"AQUAGYM", "KRISTELLER", "DIC_NULLIPAROUS"}};
  static const PublishedBest freq{{"TYPE_PARTO", "EPISIOTOM", "DIC_NULLIPAROUS"},
                                  {"AQUAGY", "STRENGTH", "PILATES"},
                                  {"TYPE_PARTO", "AQUAGYM", "STRENGTH"}};
  if (target == "UI" || target == "INT_UI") return ui;
  if (target == "STRESS_UI") return stress;
  if (target == "FREQ_UI") return freq;
  throw ConfigError("unknown prediction target '" + std::string(target) + "'");
}

FeatureGroupSpec published_group(GroupName name, const std::array<std::string_view, 3>& tokens, const Schema& schema,
                                 std::optional<Role> expected_role) {
  FeatureGroupSpec g;
  g.name = name;
  g.provenance = GroupProvenance::published;
  for (auto t : tokens) {
    auto canon = canonical_name(t, schema);
    if (!canon) {
      g.placeholders.emplace_back(t);
      g.notes.push_back("variable " + std::string(t) + " has no schema definition; group not executable");
      continue;
    }
    if (*canon != t) g.notes.push_back(std::string(t) + " mapped to " + *canon);
    const auto role = schema.column(*canon).role;
    if (expected_role && role != *expected_role) {
      g.notes.push_back(*canon + " is declared " + std::string(to_string(role)) + " but listed under " +
                        std::string(to_string(*expected_role)) + " best");
    }
    g.members.push_back(*canon);
  }
  return g;
}

FeatureGroupSpec data_driven_group(GroupName name, const std::vector<std::string>& universe, const Dataset& data,
                                   const Labels& y) {
  FeatureGroupSpec g;
  g.name = name;
  g.provenance = GroupProvenance::data_driven;
  g.members = select_k_best(project_group(data, universe), y, 3);
  return g;
}

}  // namespace

std::array<FeatureGroupSpec, 6> build_groups(const Schema& schema, std::string_view target, GroupMode mode,
                                             const Dataset* data) {
  if (std::find(kPredictionTargets.begin(), kPredictionTargets.end(), target) == kPredictionTargets.end()) {
    throw ConfigError("unknown prediction target '" + std::string(target) + "'");
  }
  const auto intrinsic = schema.names(Role::intrinsic);
  const auto extrinsic = schema.names(Role::extrinsic);
  std::vector<std::string> all;
  for (const auto& c : schema.columns()) {
    if (c.role != Role::outcome) all.push_back(c.name);
  }

  std::array<FeatureGroupSpec, 6> groups;
  groups[0] = {GroupName::intrinsic, intrinsic, {}, GroupProvenance::schema, {}};
  groups[2] = {GroupName::extrinsic, extrinsic, {}, GroupProvenance::schema, {}};
  groups[4] = {GroupName::all, all, {}, GroupProvenance::schema, {}};

  if (mode == GroupMode::replication) {
    const auto& best = published_best(target);
    groups[1] = published_group(GroupName::intrinsic_best, best.intrinsic, schema, Role::intrinsic);
    groups[3] = published_group(GroupName::extrinsic_best, best.extrinsic, schema, Role::extrinsic);
    groups[5] = published_group(GroupName::best_of_all, best.overall, schema, std::nullopt);
  } else {
    if (!data) throw ConfigError("data-driven feature groups need a dataset");
    const auto y = data->labels(target);
    groups[1] = data_driven_group(GroupName::intrinsic_best, intrinsic, *data, y);
    groups[3] = data_driven_group(GroupName::extrinsic_best, extrinsic, *data, y);
    groups[5] = data_driven_group(GroupName::best_of_all, all, *data, y);
  }
  return groups;
}

nlohmann::json to_json(const FeatureGroupSpec& g) {
  return {{"name", to_string(g.name)},
          {"members", g.members},
          {"placeholders", g.placeholders},
          {"provenance", to_string(g.provenance)},
          {"notes", g.notes}};
}

FeatureGroupSpec group_from_json(const nlohmann::json& j) {
  FeatureGroupSpec g;
  g.name = group_from_string(j.at("name").get<std::string>());
  g.members = j.at("members").get<std::vector<std::string>>();
  g.placeholders = j.value("placeholders", std::vector<std::string>{});
  const auto prov = j.value("provenance", std::string("schema-derived"));
  if (prov == "table4-fixed") {
    g.provenance = GroupProvenance::published;
  } else if (prov == "data-driven") {
    g.provenance = GroupProvenance::data_driven;
  } else {
    g.provenance = GroupProvenance::schema;
  }
  g.notes = j.value("notes", std::vector<std::string>{});
  return g;
}

}  // namespace ppui
