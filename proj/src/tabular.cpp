#include "ppui/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace ppui {

Labels distinct_labels(const Labels& y) {
  Labels out(y);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Matrix take_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::intrinsic: return "intrinsic";
    case Role::extrinsic: return "extrinsic";
    case Role::outcome: return "outcome";
  }
  return "?";
}

Role role_from_string(std::string_view text) {
  if (text == "intrinsic") return Role::intrinsic;
  if (text == "extrinsic") return Role::extrinsic;
  if (text == "outcome") return Role::outcome;
  throw ConfigError("unknown role '" + std::string(text) + "'");
}

const Categorical& ColumnSpec::as_categorical() const {
  if (const auto* c = std::get_if<Categorical>(&kind)) return *c;
  throw ConfigError("column " + name + " is not categorical");
}

std::size_t ColumnSpec::level_count() const { return as_categorical().levels.size(); }

Schema::Schema(std::vector<ColumnSpec> columns) : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (const auto& c : columns_) {
    if (c.name.empty()) throw ConfigError("schema column with empty name");
    if (!seen.insert(c.name).second) throw ConfigError("duplicate schema column " + c.name);
    if (const auto* cat = std::get_if<Categorical>(&c.kind)) {
      if (cat->levels.empty()) throw ConfigError("categorical column " + c.name + " has no levels");
      std::set<std::string> lv(cat->levels.begin(), cat->levels.end());
      if (lv.size() != cat->levels.size()) {
        throw ConfigError("categorical column " + c.name + " has duplicate levels");
      }
    }
  }
}

std::optional<std::size_t> Schema::find(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw ConfigError("unknown column " + std::string(name));
}

std::vector<std::string> Schema::names(Role role) const {
  std::vector<std::string> out;
  for (const auto& c : columns_) {
    if (c.role == role) out.push_back(c.name);
  }
  return out;
}

nlohmann::json Schema::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    nlohmann::json j{{"name", c.name}, {"role", to_string(c.role)}};
    if (const auto* cat = std::get_if<Categorical>(&c.kind)) {
      j["kind"] = "categorical";
      j["levels"] = cat->levels;
    } else {
      j["kind"] = "continuous";
      j["unit"] = std::get<Continuous>(c.kind).unit;
    }
    if (!c.description.empty()) j["description"] = c.description;
    cols.push_back(std::move(j));
  }
  return {{"columns", cols}};
}

Schema Schema::from_json(const nlohmann::json& j) {
  try {
    std::vector<ColumnSpec> cols;
    for (const auto& c : j.at("columns")) {
      ColumnSpec spec;
      spec.name = c.at("name").get<std::string>();
      spec.role = role_from_string(c.at("role").get<std::string>());
      const auto kind = c.at("kind").get<std::string>();
      if (kind == "categorical") {
        spec.kind = Categorical{c.at("levels").get<std::vector<std::string>>()};
      } else if (kind == "continuous") {
        spec.kind = Continuous{c.value("unit", std::string{})};
      } else {
        throw ConfigError("column " + spec.name + ": unknown kind '" + kind + "'");
      }
      spec.description = c.value("description", std::string{});
      cols.push_back(std::move(spec));
    }
    return Schema(std::move(cols));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed schema: ") + e.what());
  }
}

namespace {

ColumnSpec cat(std::string name, Role role, std::vector<std::string> levels, std::string desc = {}) {
  return {std::move(name), Categorical{std::move(levels)}, role, std::move(desc)};
}

ColumnSpec cont(std::string name, Role role, std::string unit, std::string desc = {}) {
  return {std::move(name), Continuous{std::move(unit)}, role, std::move(desc)};
}

const std::vector<std::string> kNoYes = {"No", "Yes"};

Schema build_cohort_schema() {
  constexpr Role ex = Role::extrinsic;
  constexpr Role in = Role::intrinsic;
  constexpr Role out = Role::outcome;
  return Schema({
      // extrinsic
      cont("AGE", ex, "years", "Patient's age"),
      cont("NUM_LABOURS", ex, "count", "Number of labors"),
      cat("DIC_NULLIPAROUS", ex, {"No previous labors", "With previous labors"},
          "Number of labors (dichotomous)"),
      cont("HEIGHT", ex, "cm", "Patient's height"),
      cont("WEIGHT", ex, "kg", "Patient's weight"),
      cont("BMI", ex, "kg/m2", "Patient's BMI"),
      cat("CAT_BMI", ex, {"Underweight", "Normal-weight", "Overweight"}, "Patient's BMI category"),
      cont("EXTRA_KG", ex, "kg", "Kg gained during pregnancy"),
      cat("CAT_EXTRAKG", ex, {"10 kg or less", "11 to 15", "16 to 20", "21 to 25"},
          "Category according to kg gained during pregnancy"),
      cat("LABOUR_PREP", ex, {"Without help", "With help"}, "How the preparation for labor went"),
      cat("PROF_CHBPR", ex, {"No", "Midwife", "Midwife and Physiotherapy"},
          "Professional who assisted in the preparation of the labor"),
      cat("PA_PREV", ex, kNoYes, "Previous physical activity undertaken"),
      cat("FREQ_PAPREV", ex, {"No", "1 to 3 times a week", "more than 3 times a week"},
          "Frequency of previous physical activity"),
      cat("IPAQ", ex, {"Low", "Moderate", "Vigorous"}, "IPAQ score"),
      cat("WALKING", ex, kNoYes, "Walked during the pregnancy"),
      cat("STRENGTH", ex, kNoYes, "Strength training"),
      cat("PILATES", ex, kNoYes, "Pilates training"),
      cat("AQUAGYM", ex, kNoYes, "Aquagym training"),
      cont("NUM_PA", ex, "count", "Number of physical activities carried out"),
      // intrinsic
      cont("WEEK_LABOUR", in, "weeks", "Week of labor"),
      cat("INJURY", in, kNoYes, "Was the patient injured?"),
      cat("EPISIOTOMY", in, kNoYes),
      cat("TEARING", in, {"No", "Slight", "Moderate"}, "Did the patient have a tear?"),
      cont("DURATION", in, "hours", "Duration of labor"),
      cat("LITOTHOMY", in, kNoYes),
      cat("POSTURE", in, {"Lithotomy", "Side", "Sitting / squatting", "Standing"},
          "Posture during labor"),
      cat("ANALGESIA", in, kNoYes, "Did the patient have analgesia?"),
      cat("TYPE_ANALGESIA", in, {"No", "Local", "Epidural", "Espinal"}, "Type of analgesia"),
      cat("TYPE_LABOUR", in, {"Euthocic", "Forceps/Spatulae", "Vacuum cups"},
          "Type of labor and assistive devices"),
      cat("KRISTELLER", in, kNoYes),
      cont("WEIGHT_BABY", in, "g", "Weight of the baby"),
      // outcomes
      cont("VAS_PERINE", out, "VAS", "Perineal pain at the 6th week postpartum"),
      cat("UI", out, kNoYes, "Urinary incontinence"),
      cat("FREQ_UI", out, {"No", "Sporadic", "Daily"}, "Frequency of urinary incontinence"),
      cat("INT_UI", out, {"No", "Mild", "Moderate", "Severe"}, "Intensity of urinary incontinence"),
      cat("AFFECT_UI", out, kNoYes),
      cat("BLADD_HYPER", out, kNoYes, "Bladder hyperactivity"),
      cat("STRESS_UI", out, kNoYes, "Stress urinary incontinence"),
      cat("UI_PREV", out, {"No", "bladder hyperactivity", "stress"},
          "Previous urinary incontinence"),
  });
}

}  // namespace

const Schema& cohort_schema() {
  static const Schema schema = build_cohort_schema();
  return schema;
}

void require_prediction_targets(const Schema& schema) {
  for (auto t : kPredictionTargets) {
    auto i = schema.find(t);
    if (!i) throw ConfigError("schema lacks prediction target " + std::string(t));
    const auto& c = schema[*i];
    if (c.role != Role::outcome || !c.categorical()) {
      throw ConfigError("prediction target " + std::string(t) + " must be a categorical outcome");
    }
  }
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file " + path.string());
  try {
    return Schema::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("schema file " + path.string() + ": " + e.what());
  }
}

void save_schema(const Schema& schema, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << schema.to_json().dump(2) << '\n';
}

Dataset::Dataset(Schema schema, Matrix cells) : schema_(std::move(schema)), cells_(std::move(cells)) {
  if (static_cast<std::size_t>(cells_.cols()) != schema_.size()) {
    throw DataError("dataset has " + std::to_string(cells_.cols()) + " columns, schema declares " +
                    std::to_string(schema_.size()));
  }
  for (std::size_t c = 0; c < schema_.size(); ++c) {
    const auto& spec = schema_[c];
    for (Eigen::Index r = 0; r < cells_.rows(); ++r) {
      const double v = cells_(r, static_cast<Eigen::Index>(c));
      if (!std::isfinite(v)) {
        throw DataError("row " + std::to_string(r + 1) + ", column " + spec.name + ": missing or non-finite value");
      }
      if (spec.categorical()) {
        const auto levels = static_cast<double>(spec.level_count());
        if (v != std::floor(v) || v < 0 || v >= levels) {
          throw DataError("row " + std::to_string(r + 1) + ", column " + spec.name +
                          ": invalid level index");
        }
      }
    }
  }
}

double Dataset::value(std::size_t row, std::string_view column) const {
  return cells_(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(schema_.index_of(column)));
}

Vector Dataset::column(std::string_view name) const {
  return cells_.col(static_cast<Eigen::Index>(schema_.index_of(name)));
}

Labels Dataset::labels(std::string_view name) const {
  const auto c = schema_.index_of(name);
  schema_[c].as_categorical();
  Labels out(rows());
  for (std::size_t r = 0; r < rows(); ++r) {
    out[r] = static_cast<Label>(cells_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
  }
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r' || s[b] == '\n')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\n')) --e;
  return std::string(s.substr(b, e - b));
}

/// RFC 4180 fields on one line: quoted fields may hold commas and "" escapes.
std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false, was_quoted = false;
  auto flush = [&] {
    out.push_back(was_quoted ? field : trim(field));
    field.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"' && trim(field).empty()) {
      field.clear();
      quoted = was_quoted = true;
    } else if (c == ',') {
      flush();
    } else if (!(was_quoted && (c == ' ' || c == '\t' || c == '\r'))) {
      field += c;
    }
  }
  if (quoted) throw DataError("unterminated quoted field");
  flush();
  return out;
}

std::optional<double> parse_real(const std::string& s) {
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<int> parse_level(const std::string& s, const Categorical& cat) {
  int code = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), code);
  if (ec == std::errc{} && ptr == s.data() + s.size()) {
    if (code >= 0 && static_cast<std::size_t>(code) < cat.levels.size()) return code;
    return std::nullopt;
  }
  for (std::size_t i = 0; i < cat.levels.size(); ++i) {
    if (cat.levels[i] == s) return static_cast<int>(i);
  }
  return std::nullopt;
}

}  // namespace

Dataset read_csv(std::istream& in, const Schema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("CSV input is empty (no header row)");
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_line(line);

  std::vector<std::size_t> target(header.size());
  std::set<std::size_t> covered;
  for (std::size_t i = 0; i < header.size(); ++i) {
    auto idx = schema.find(header[i]);
    if (!idx) throw DataError("CSV header: unknown column '" + header[i] + "'");
    if (!covered.insert(*idx).second) throw DataError("CSV header: duplicate column '" + header[i] + "'");
    target[i] = *idx;
  }
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (!covered.count(c)) throw DataError("CSV header: missing column '" + schema[c].name + "'");
  }

  std::vector<std::vector<double>> rows;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row_no;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw DataError("row " + std::to_string(row_no) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(schema.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& spec = schema[target[i]];
      const auto where = "row " + std::to_string(row_no) + ", column " + spec.name;
      if (cells[i].empty()) throw DataError(where + ": missing value");
      if (const auto* cat = std::get_if<Categorical>(&spec.kind)) {
        auto level = parse_level(cells[i], *cat);
        if (!level) throw DataError(where + ": value '" + cells[i] + "' is not a declared level");
        row[target[i]] = *level;
      } else {
        auto v = parse_real(cells[i]);
        if (!v) throw DataError(where + ": cannot parse '" + cells[i] + "' as a number");
        row[target[i]] = *v;
      }
    }
    rows.push_back(std::move(row));
  }

  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(schema.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return Dataset(schema, std::move(m));
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file " + path.string());
  return read_csv(in, schema);
}

void write_csv(std::ostream& out, const Dataset& data) {
  const auto& schema = data.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) out << (c ? "," : "") << schema[c].name;
  out << '\n';
  char buf[64];
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const double v = data.cells()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      if (c) out << ',';
      if (schema[c].categorical()) {
        out << static_cast<int>(v);
      } else {
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
      }
    }
    out << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_csv(out, data);
}

EncodedColumn encode_categorical(const Dataset& data, std::string_view column) {
  const auto& spec = data.schema().column(column);
  if (!spec.categorical()) throw ConfigError("column " + spec.name + " is not categorical");
  EncodedColumn enc;
  const auto& levels = spec.as_categorical().levels;
  for (std::size_t i = 0; i < levels.size(); ++i) enc.mapping.emplace_back(levels[i], static_cast<int>(i));
  const auto labels = data.labels(column);
  enc.codes.assign(labels.begin(), labels.end());
  return enc;
}

std::vector<std::string> decode_categorical(const EncodedColumn& encoded) {
  std::vector<std::string> out;
  out.reserve(encoded.codes.size());
  for (int code : encoded.codes) {
    auto it = std::find_if(encoded.mapping.begin(), encoded.mapping.end(),
                           [code](const auto& p) { return p.second == code; });
    if (it == encoded.mapping.end()) throw DataError("code " + std::to_string(code) + " has no level");
    out.push_back(it->first);
  }
  return out;
}

std::vector<std::string> categorical_cells(const Dataset& data, std::string_view column) {
  const auto& levels = data.schema().column(column).as_categorical().levels;
  std::vector<std::string> out;
  for (auto l : data.labels(column)) out.push_back(levels[static_cast<std::size_t>(l)]);
  return out;
}

std::vector<std::string> FeatureMatrix::names() const {
  std::vector<std::string> out;
  for (const auto& c : columns) out.push_back(c.source);
  return out;
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::size_t>& rows) const {
  return {take_rows(values, rows), columns};
}

FeatureMatrix project_group(const Dataset& data, const std::vector<std::string>& members) {
  const auto& schema = data.schema();
  FeatureMatrix fm;
  fm.values.resize(static_cast<Eigen::Index>(data.rows()), static_cast<Eigen::Index>(members.size()));
  for (std::size_t j = 0; j < members.size(); ++j) {
    auto idx = schema.find(members[j]);
    if (!idx) throw ConfigError("feature group references unknown column " + members[j]);
    const auto& spec = schema[*idx];
    if (spec.role == Role::outcome) {
      throw ConfigError("feature group references outcome column " + spec.name + " (leakage)");
    }
    fm.values.col(static_cast<Eigen::Index>(j)) = data.cells().col(static_cast<Eigen::Index>(*idx));
    fm.columns.push_back({spec.name, spec.categorical() ? Encoding::label : Encoding::raw, spec.categorical()});
  }
  return fm;
}

std::vector<std::string> ScalerParams::constant_columns() const {
  std::vector<std::string> out;
  for (const auto& s : scales) {
    if (s.constant) out.push_back(columns[s.column]);
  }
  return out;
}

ScalerParams fit_scaler(const FeatureMatrix& m, std::span<const std::size_t> training_rows) {
  ScalerParams p;
  p.columns = m.names();
  p.fitted_rows.assign(training_rows.begin(), training_rows.end());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (m.columns[j].categorical) continue;
    if (training_rows.size() < 2) {
      throw ConfigError("scaler needs at least 2 training rows for column " + m.columns[j].source);
    }
    double sum = 0.0;
    for (auto r : training_rows) sum += m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j));
    const double n = static_cast<double>(training_rows.size());
    const double mean = sum / n;
    double ss = 0.0;
    for (auto r : training_rows) {
      const double d = m.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) - mean;
      ss += d * d;
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    p.scales.push_back({j, mean, sd, sd == 0.0});
  }
  return p;
}

ScalerParams fit_scaler(const FeatureMatrix& m) {
  std::vector<std::size_t> all(m.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return fit_scaler(m, all);
}

FeatureMatrix apply_scaler(const ScalerParams& params, const FeatureMatrix& m) {
  if (params.columns != m.names()) throw ConfigError("scaler was fitted on a different column set");
  FeatureMatrix out = m;
  for (const auto& s : params.scales) {
    auto col = out.values.col(static_cast<Eigen::Index>(s.column));
    col.array() -= s.mean;
    if (!s.constant) col.array() /= s.sd;
    out.columns[s.column].encoding = Encoding::standardized;
  }
  return out;
}

MinMaxParams fit_min_max(const FeatureMatrix& m, std::span<const std::size_t> training_rows) {
  if (training_rows.empty()) throw ConfigError("min-max scaling needs at least one training row");
  MinMaxParams p;
  p.columns = m.names();
  p.fitted_rows.assign(training_rows.begin(), training_rows.end());
  p.min = Vector::Constant(static_cast<Eigen::Index>(m.cols()), std::numeric_limits<double>::infinity());
  p.max = Vector::Constant(static_cast<Eigen::Index>(m.cols()), -std::numeric_limits<double>::infinity());
  for (auto r : training_rows) {
    const auto row = m.values.row(static_cast<Eigen::Index>(r));
    p.min = p.min.cwiseMin(row.transpose());
    p.max = p.max.cwiseMax(row.transpose());
  }
  return p;
}

FeatureMatrix apply_min_max(const MinMaxParams& params, const FeatureMatrix& m) {
  if (params.columns != m.names()) throw ConfigError("min-max scaler was fitted on a different column set");
  FeatureMatrix out = m;
  for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
    const double lo = params.min(j);
    const double range = params.max(j) - lo;
    auto col = out.values.col(j);
    if (range > 0.0) {
      col = ((col.array() - lo) / range).cwiseMax(0.0).cwiseMin(1.0).matrix();
    } else {
      // constant on training rows: 0 at the fitted value, 1 elsewhere
      col = (col.array() != lo).cast<double>().matrix();
    }
    out.columns[static_cast<std::size_t>(j)].encoding = Encoding::min_max;
  }
  return out;
}

}  // namespace ppui
