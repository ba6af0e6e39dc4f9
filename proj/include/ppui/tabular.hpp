#pragma once

// Typed tabular cohorts: schema, dataset, CSV ingestion, label encoding and
// fold-safe feature scaling.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ppui/common.hpp"

namespace ppui {

enum class Role { intrinsic, extrinsic, outcome };

std::string_view to_string(Role role);
Role role_from_string(std::string_view text);

struct Categorical {
  /// Level labels in code order: level i is encoded as integer i.
  std::vector<std::string> levels;
};

struct Continuous {
  std::string unit;
};

using FeatureKind = std::variant<Categorical, Continuous>;

struct ColumnSpec {
  std::string name;
  FeatureKind kind;
  Role role = Role::extrinsic;
  std::string description;

  bool categorical() const { return std::holds_alternative<Categorical>(kind); }
  const Categorical& as_categorical() const;
  std::size_t level_count() const;
};

/// Ordered list of uniquely named, typed columns. Immutable after construction.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ColumnSpec> columns);

  std::size_t size() const { return columns_.size(); }
  const ColumnSpec& operator[](std::size_t i) const { return columns_[i]; }
  const std::vector<ColumnSpec>& columns() const { return columns_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws ConfigError for unknown names.
  std::size_t index_of(std::string_view name) const;
  const ColumnSpec& column(std::string_view name) const { return columns_[index_of(name)]; }

  /// Names with the given role, in declaration order.
  std::vector<std::string> names(Role role) const;

  nlohmann::json to_json() const;
  static Schema from_json(const nlohmann::json& j);

 private:
  std::vector<ColumnSpec> columns_;
};

inline constexpr std::array<std::string_view, 4> kPredictionTargets = {"UI", "STRESS_UI", "FREQ_UI",
                                                                       "INT_UI"};

/// The cohort schema: 19 extrinsic, 12 intrinsic and 8 outcome variables.
const Schema& cohort_schema();

/// Throws ConfigError unless all four prediction targets exist as categorical
/// outcome columns.
void require_prediction_targets(const Schema& schema);

Schema load_schema(const std::filesystem::path& path);
void save_schema(const Schema& schema, const std::filesystem::path& path);

/// Row-major n x p table. Categorical cells hold their level index, continuous
/// cells their value. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;
  /// Validates every cell against the schema; throws DataError.
  Dataset(Schema schema, Matrix cells);

  const Schema& schema() const { return schema_; }
  const Matrix& cells() const { return cells_; }
  std::size_t rows() const { return static_cast<std::size_t>(cells_.rows()); }

  double value(std::size_t row, std::string_view column) const;
  Vector column(std::string_view name) const;
  /// Level indices of a categorical column.
  Labels labels(std::string_view name) const;

 private:
  Schema schema_;
  Matrix cells_;
};

Dataset read_csv(std::istream& in, const Schema& schema);
Dataset load_csv(const std::filesystem::path& path, const Schema& schema);
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

struct EncodedColumn {
  std::vector<int> codes;
  /// level label -> integer, in schema declaration order.
  std::vector<std::pair<std::string, int>> mapping;
};

EncodedColumn encode_categorical(const Dataset& data, std::string_view column);
std::vector<std::string> decode_categorical(const EncodedColumn& encoded);
/// Level labels of every cell of a categorical column.
std::vector<std::string> categorical_cells(const Dataset& data, std::string_view column);

enum class Encoding { label, raw, standardized, min_max };

struct FeatureColumn {
  std::string source;
  Encoding encoding = Encoding::raw;
  bool categorical = false;
};

struct FeatureMatrix {
  Matrix values;
  std::vector<FeatureColumn> columns;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }
  std::vector<std::string> names() const;
  /// Same columns, selected rows.
  FeatureMatrix subset(const std::vector<std::size_t>& rows) const;
};

/// Columns of `members`, in the given order, label-encoded or raw continuous.
/// Outcome columns are refused (leakage guard).
FeatureMatrix project_group(const Dataset& data, const std::vector<std::string>& members);

struct ColumnScale {
  std::size_t column = 0;
  double mean = 0.0;
  double sd = 0.0;
  /// sd == 0 on the training rows: values are centered only.
  bool constant = false;
};

/// Standardization of the continuous columns of a FeatureMatrix.
struct ScalerParams {
  std::vector<std::string> columns;
  std::vector<ColumnScale> scales;
  /// Row indices (of the matrix passed to fit_scaler) the statistics came from.
  std::vector<std::size_t> fitted_rows;

  std::vector<std::string> constant_columns() const;
};

ScalerParams fit_scaler(const FeatureMatrix& m, std::span<const std::size_t> training_rows);
/// Fits on every row.
ScalerParams fit_scaler(const FeatureMatrix& m);
FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& m);

/// Per-column [min, max] map onto [0, 1], for models that need non-negative
/// inputs. Applies to every column; values outside the fitted range clip.
struct MinMaxParams {
  std::vector<std::string> columns;
  Vector min;
  Vector max;
  std::vector<std::size_t> fitted_rows;
};

MinMaxParams fit_min_max(const FeatureMatrix& m, std::span<const std::size_t> training_rows);
FeatureMatrix apply_min_max(const MinMaxParams& params, const FeatureMatrix& m);

}  // namespace ppui
