#pragma once

// The published F1 grid (31 model rows x 6 feature groups), the summary values
// printed alongside it, and the checks that recompute them.

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppui/classifier.hpp"
#include "ppui/evalstat.hpp"
#include "ppui/select.hpp"

namespace ppui {

/// target x model rows, one F1 per feature group in kGroupOrder (nullopt when
/// the run was skipped).
struct F1Grid {
  struct Row {
    std::string target;
    ModelId model = ModelId::gaussian_nb;
    std::array<std::optional<double>, 6> f1;
  };
  std::vector<Row> rows;

  /// rows x 6 with NaN for missing cells.
  Matrix matrix() const;
  std::vector<std::string> targets() const;
};

struct TopEntry {
  std::string target;
  ModelId model = ModelId::gaussian_nb;
  GroupName group = GroupName::all;
  double f1 = 0.0;
};

/// Per target, the k best cells by descending F1; ties keep row order, then
/// group column order. Targets appear in grid order.
std::vector<std::pair<std::string, std::vector<TopEntry>>> top_models(const F1Grid& grid, std::size_t k = 3);

struct PublishedGroupRow {
  GroupName group;
  std::size_t n;
  double mean;
  double sd;
};

struct PublishedTTest {
  GroupName a;
  GroupName b;
  double t;
  int df;
  double p;
  // means and SDs quoted with the test
  double mean_a, sd_a, mean_b, sd_b;
};

struct PublishedFixture {
  F1Grid grid;
  std::array<PublishedGroupRow, 6> group_rows;
  std::vector<TopEntry> top_listing;
  /// Average F1 in percent for intrinsic, extrinsic, intrinsic_best, extrinsic_best.
  std::array<std::pair<GroupName, double>, 4> quoted_means_pct;
  std::array<PublishedTTest, 2> ttests;
};

const PublishedFixture& published_fixture();

/// FNV-1a over the grid rendered at two decimals.
std::uint64_t grid_checksum(const F1Grid& grid);
/// Checksum of the published grid as transcribed.
std::uint64_t pinned_grid_checksum();

struct VerificationCheck {
  std::string name;
  double computed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct TTestComparison {
  GroupName a;
  GroupName b;
  std::vector<TTestResult> results;  // paired, pooled, welch
  PublishedTTest published;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  /// Printed values that disagree with recomputation or with each other.
  std::vector<std::string> discrepancies;
  std::vector<TTestComparison> ttests;
  GroupStats stats;
  std::vector<std::pair<std::string, std::vector<TopEntry>>> top;

  bool passed() const;
};

/// Recomputes the summary statistics from the fixture grid. Throws DataError
/// when the grid does not match the pinned checksum.
VerificationReport verify_paper_stats(const PublishedFixture& fixture);

std::string render(const VerificationReport& report);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const TTestResult& t);
nlohmann::json to_json(const TopEntry& e);

}  // namespace ppui
