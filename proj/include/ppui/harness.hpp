#pragma once

// The full experiment: every target x model x feature group through
// cross-validation, then group statistics, t-tests and top models.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ppui/classifier.hpp"
#include "ppui/cohort.hpp"
#include "ppui/evalstat.hpp"
#include "ppui/fixture.hpp"
#include "ppui/select.hpp"
#include "ppui/tabular.hpp"

namespace ppui {

inline constexpr std::string_view kToolkitVersion = "0.1.0";

struct ProtocolConfig {
  /// When unset, a synthetic cohort is generated from `cohort`.
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> schema;
  CohortConfig cohort = default_cohort_config();
  std::vector<std::string> targets{kPredictionTargets.begin(), kPredictionTargets.end()};
  std::vector<ModelId> models{kModelOrder.begin(), kModelOrder.end()};
  GroupMode group_mode = GroupMode::replication;
  int folds = 10;
  bool stratified = true;
  std::uint64_t seed = 0;
  /// Per-target override; otherwise binary for two-level targets, weighted otherwise.
  std::map<std::string, Averaging> averaging;
  unsigned workers = 1;
};

void validate(const ProtocolConfig& config);
nlohmann::json to_json(const ProtocolConfig& config);
/// Relative csv/schema paths resolve against `base`.
ProtocolConfig protocol_config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
ProtocolConfig load_protocol_config(const std::filesystem::path& path);

Averaging default_averaging(const Schema& schema, std::string_view target);

struct RunCell {
  std::string target;
  ModelId model = ModelId::gaussian_nb;
  GroupName group = GroupName::all;
  bool skipped = false;
  std::string reason;
  std::vector<std::string> members;
  double mean_f1 = 0.0;
  std::vector<double> fold_f1;
  nlohmann::json params;
  std::size_t evaluations = 0;
  std::vector<std::string> notes;
  bool leakage_audit_passed = true;
  /// Full result with fold audits; only present for cells run in this process.
  std::optional<CVResult> detail;
};

struct TargetInfo {
  std::string name;
  Averaging averaging = Averaging::weighted;
  std::vector<FeatureGroupSpec> groups;
};

struct NamedTTest {
  GroupName a;
  GroupName b;
  std::optional<TTestResult> result;
  std::string note;  // why result is absent
};

struct ExperimentReport {
  std::string toolkit_version{kToolkitVersion};
  nlohmann::json config;
  std::uint64_t seed = 0;
  int folds = 0;
  GroupMode group_mode = GroupMode::replication;
  std::size_t rows = 0;
  std::vector<TargetInfo> targets;
  std::vector<ModelId> models;
  /// Target-major, then model, then group order.
  std::vector<RunCell> cells;
  std::optional<GroupStats> stats;
  std::vector<NamedTTest> ttests;
  std::size_t cv_executions = 0;
  std::size_t cells_skipped = 0;
  std::vector<std::string> notes;

  F1Grid grid() const;
};

/// Runs the protocol on a loaded dataset.
ExperimentReport run_protocol(const ProtocolConfig& config, const Dataset& data);
/// Loads the CSV named by the config, or generates the synthetic cohort.
ExperimentReport run_protocol(const ProtocolConfig& config);
Dataset load_protocol_data(const ProtocolConfig& config);

/// Recomputes group statistics and t-tests from the cells.
void summarize(ExperimentReport& report);

enum class ReportFormat { csv, markdown_table, json };
std::string_view to_string(ReportFormat f);
ReportFormat report_format_from_string(std::string_view text);
std::string_view extension(ReportFormat f);

std::string render_report(const ExperimentReport& report, ReportFormat format);
/// Writes report.<ext> into `dir`, creating it; returns the file written.
std::filesystem::path emit_report(const ExperimentReport& report, ReportFormat format, const std::filesystem::path& dir);

nlohmann::json to_json(const ExperimentReport& report);
ExperimentReport report_from_json(const nlohmann::json& j);
ExperimentReport load_report(const std::filesystem::path& path);

}  // namespace ppui
