#pragma once

// Univariate feature scoring and the six per-target feature groups.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ppui/tabular.hpp"

namespace ppui {

/// One-way ANOVA F statistic of a feature against class labels. Zero
/// within-class variance with nonzero between-class variance gives +inf.
double anova_f_score(const Eigen::Ref<const Vector>& feature, const Labels& y);

using FeatureScorer = std::function<double(const Eigen::Ref<const Vector>&, const Labels&)>;

/// Names of the k highest-scoring columns, descending; ties keep column order.
std::vector<std::string> select_k_best(const FeatureMatrix& X, const Labels& y, int k,
                                       const FeatureScorer& scorer = anova_f_score);

enum class GroupName { intrinsic, intrinsic_best, extrinsic, extrinsic_best, all, best_of_all };

/// Report column order.
inline constexpr std::array<GroupName, 6> kGroupOrder = {GroupName::intrinsic,      GroupName::intrinsic_best,
                                                         GroupName::extrinsic,      GroupName::extrinsic_best,
                                                         GroupName::all,            GroupName::best_of_all};

std::string_view to_string(GroupName g);
/// Short column heading ("Int.", "Ext. best", ...).
std::string_view heading(GroupName g);
GroupName group_from_string(std::string_view text);

enum class GroupProvenance { schema, published, data_driven };
std::string_view to_string(GroupProvenance p);

enum class GroupMode { replication, data_driven };
GroupMode group_mode_from_string(std::string_view text);
std::string_view to_string(GroupMode m);

struct FeatureGroupSpec {
  GroupName name = GroupName::all;
  /// Resolved schema column names.
  std::vector<std::string> members;
  /// Tokens with no schema definition (carried, never executed).
  std::vector<std::string> placeholders;
  GroupProvenance provenance = GroupProvenance::schema;
  std::vector<std::string> notes;

  bool executable() const { return placeholders.empty(); }
  std::size_t size() const { return members.size() + placeholders.size(); }
};

inline FeatureMatrix project_group(const Dataset& data, const FeatureGroupSpec& group) {
  return project_group(data, group.members);
}

/// Maps the spelling variants of the published best-variable table onto schema
/// names. Returns nullopt for tokens with no schema column.
std::optional<std::string> canonical_name(std::string_view token, const Schema& schema);

/// The six groups for `target`, in kGroupOrder. Replication mode takes the
/// best groups from the published table; data-driven mode needs `data` and
/// runs select_k_best(k = 3) inside each role universe.
std::array<FeatureGroupSpec, 6> build_groups(const Schema& schema, std::string_view target, GroupMode mode,
                                             const Dataset* data = nullptr);

nlohmann::json to_json(const FeatureGroupSpec& g);
FeatureGroupSpec group_from_json(const nlohmann::json& j);

}  // namespace ppui
