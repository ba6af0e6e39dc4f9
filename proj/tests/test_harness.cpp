#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ppui/harness.hpp"

using namespace ppui;
namespace fs = std::filesystem;

namespace {

/// Enough of JSON Schema for the shipped report schema: type, enum, required,
/// properties, additionalProperties, items, minimum, maximum.
void check_schema(const nlohmann::json& v, const nlohmann::json& s, const std::string& path,
                  std::vector<std::string>& errors) {
  auto fail = [&](const std::string& what) { errors.push_back(path + ": " + what); };
  if (s.contains("type")) {
    const auto t = s["type"].get<std::string>();
    const bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
                    (t == "string" && v.is_string()) || (t == "boolean" && v.is_boolean()) ||
                    (t == "integer" && v.is_number_integer()) || (t == "number" && v.is_number());
    if (!ok) return fail("expected " + t);
  }
  if (s.contains("enum")) {
    bool found = false;
    for (const auto& e : s["enum"]) found |= e == v;
    if (!found) fail("value " + v.dump() + " not in enum");
  }
  if (v.is_number()) {
    if (s.contains("minimum") && v.get<double>() < s["minimum"].get<double>()) fail("below minimum");
    if (s.contains("maximum") && v.get<double>() > s["maximum"].get<double>()) fail("above maximum");
  }
  if (v.is_object()) {
    for (const auto& r : s.value("required", nlohmann::json::array())) {
      if (!v.contains(r.get<std::string>())) fail("missing " + r.get<std::string>());
    }
    const auto props = s.value("properties", nlohmann::json::object());
    for (const auto& [k, child] : v.items()) {
      if (props.contains(k)) {
        check_schema(child, props[k], path + "." + k, errors);
      } else if (s.contains("additionalProperties")) {
        const auto& ap = s["additionalProperties"];
        if (ap.is_boolean()) {
          if (!ap.get<bool>()) fail("unexpected key " + k);
        } else {
          check_schema(child, ap, path + "." + k, errors);
        }
      }
    }
  }
  if (v.is_array() && s.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) check_schema(v[i], s["items"], path + "[" + std::to_string(i) + "]", errors);
  }
}

nlohmann::json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in);
  return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ProtocolConfig small_config() {
  ProtocolConfig c;
  c.targets = {"UI", "FREQ_UI"};
  c.models = {ModelId::gaussian_nb, ModelId::knn_improved, ModelId::knn_imp_smote};
  c.folds = 5;
  c.seed = 3;
  return c;
}

const ExperimentReport& small_report() {
  static const ExperimentReport r = run_protocol(small_config());
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("ppui_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(PPUI_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("protocol covers every cell and accounts for skipped ones") {
  const auto& r = small_report();
  CHECK(r.cells.size() == 2 * 3 * 6);
  CHECK(r.cv_executions + r.cells_skipped == r.cells.size());
  // the UI extrinsic-best triple carries a placeholder member
  std::size_t skipped = 0;
  for (const auto& c : r.cells) {
    if (c.skipped) {
      ++skipped;
      CHECK(c.target == "UI");
      CHECK(c.group == GroupName::extrinsic_best);
      CHECK(c.reason.find("GROUP") != std::string::npos);
    } else {
      CHECK(c.fold_f1.size() == 5);
      CHECK(c.mean_f1 >= 0.0);
      CHECK(c.mean_f1 <= 1.0);
      CHECK(c.leakage_audit_passed);
    }
  }
  CHECK(skipped == 3);
  CHECK(r.targets[0].averaging == Averaging::binary);
  CHECK(r.targets[1].averaging == Averaging::weighted);
  REQUIRE(r.stats);
  CHECK(r.stats->groups.size() == 6);
  CHECK(r.ttests.size() == 2);
}

TEST_CASE("reports are identical across worker counts") {
  auto c = small_config();
  c.workers = 3;
  const auto threaded = run_protocol(c);
  CHECK(to_json(threaded).dump() == to_json(small_report()).dump());
  for (auto f : {ReportFormat::csv, ReportFormat::markdown_table}) {
    CHECK(render_report(threaded, f) == render_report(small_report(), f));
  }
}

TEST_CASE("JSON report round trips exactly and validates against the shipped schema") {
  const auto j = to_json(small_report());
  const auto back = report_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(render_report(back, ReportFormat::markdown_table) == render_report(small_report(), ReportFormat::markdown_table));
  const auto schema = load_json(fs::path(PPUI_SOURCE_DIR) / "schemas" / "report.schema.json");
  std::vector<std::string> errors;
  check_schema(j, schema, "$", errors);
  CHECK_MESSAGE(errors.empty(), (errors.empty() ? "" : errors[0]));

  auto broken = j;
  broken["cells"][0]["status"] = "maybe";
  broken.erase("seed");
  errors.clear();
  check_schema(broken, schema, "$", errors);
  CHECK(errors.size() == 2);
}

TEST_CASE("markdown table keeps the feature group column order") {
  const auto md = render_report(small_report(), ReportFormat::markdown_table);
  CHECK(md.find("| Target | Model | Int. | Int. best | Ext. | Ext. best | All | Best of all |") != std::string::npos);
  CHECK(md.find("n/a") != std::string::npos);
  const auto csv = render_report(small_report(), ReportFormat::csv);
  CHECK(csv.rfind("target,model,group,status,mean_f1,fold_1,fold_2,fold_3,fold_4,fold_5,params\n", 0) == 0);
}

TEST_CASE("an empty report renders headers only") {
  ExperimentReport empty;
  empty.folds = 2;
  CHECK(render_report(empty, ReportFormat::csv) == "target,model,group,status,mean_f1,fold_1,fold_2,params\n");
  const auto md = render_report(empty, ReportFormat::markdown_table);
  CHECK(md.find("| Target | Model |") != std::string::npos);
  CHECK(md.find("| UI |") == std::string::npos);
  const auto back = report_from_json(to_json(empty));
  CHECK(back.cells.empty());
  CHECK(!back.stats);
}

TEST_CASE("emit_report writes one file per format") {
  const auto dir = scratch("emit");
  for (auto f : {ReportFormat::csv, ReportFormat::markdown_table, ReportFormat::json}) {
    const auto p = emit_report(small_report(), f, dir);
    CHECK(fs::exists(p));
    CHECK(slurp(p) == render_report(small_report(), f));
  }
  CHECK(load_report(dir / "report.json").cells.size() == small_report().cells.size());
}

TEST_CASE("protocol config JSON parsing") {
  const auto c = protocol_config_from_json(
      {{"targets", {"UI"}}, {"models", {"GaussianNB", "knn_imp_smote"}}, {"folds", 4}, {"f1_averaging", "macro"},
       {"groups", "data-driven"}, {"cohort", {{"preset", "planted-extrinsic"}, {"n", 120}}}});
  CHECK(c.targets == std::vector<std::string>{"UI"});
  CHECK(c.models == std::vector<ModelId>{ModelId::gaussian_nb, ModelId::knn_imp_smote});
  CHECK(c.averaging.at("UI") == Averaging::macro);
  CHECK(c.group_mode == GroupMode::data_driven);
  CHECK(c.cohort.n == 120);
  CHECK(protocol_config_from_json(to_json(c)).cohort.n == 120);
  CHECK_THROWS_AS(protocol_config_from_json({{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(protocol_config_from_json({{"folds", 1}}), ConfigError);
  CHECK_THROWS_AS(protocol_config_from_json({{"targets", {"AGE"}}}), ConfigError);
  CHECK_THROWS_AS(protocol_config_from_json({{"models", {"gaussian_nb", "GaussianNB"}}}), ConfigError);
  CHECK_THROWS_AS(protocol_config_from_json({{"folds", "ten"}}), ConfigError);
  CHECK(!to_json(small_config()).contains("workers"));
}

TEST_CASE("CSV input runs through the same protocol") {
  const auto dir = scratch("csv");
  const auto data = generate_cohort(default_cohort_config(60, 2));
  save_csv(dir / "cohort.csv", data);
  auto c = small_config();
  c.csv = dir / "cohort.csv";
  c.targets = {"STRESS_UI"};
  const auto r = run_protocol(c);
  CHECK(r.rows == 60);
  CHECK(r.cells_skipped == 0);
  CHECK(!to_json(c).contains("cohort"));
}

TEST_CASE("CLI exit codes") {
  const auto dir = scratch("cli");
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("no-such-command") == 1);
  CHECK(run_cli("verify-paper") == 0);
  CHECK(run_cli("verify-paper --strict") == 3);
  CHECK(run_cli("verify-paper --out " + (dir / "v").string()) == 0);
  CHECK(fs::exists(dir / "v" / "verification.json"));
  CHECK(run_cli("run-protocol --folds 1") == 1);
  CHECK(run_cli("run-protocol --groups sideways") == 1);
  CHECK(run_cli("generate-cohort --n 40 --seed 4 --out " + (dir / "c.csv").string()) == 0);
  CHECK(run_cli("run-protocol --data " + (dir / "c.csv").string() + " --folds 4 --format csv --format json --out " +
                (dir / "run").string()) == 0);
  CHECK(fs::exists(dir / "run" / "report.csv"));
  CHECK(run_cli("report --input " + (dir / "run" / "report.json").string() + " --format markdown-table --out " +
                (dir / "md").string()) == 0);
  CHECK(fs::exists(dir / "md" / "report.md"));

  std::ofstream(dir / "bad.csv") << "AGE,UI\n30,2\n";
  CHECK(run_cli("run-protocol --data " + (dir / "bad.csv").string()) == 2);
  std::ofstream(dir / "bad.json") << "{ not json";
  CHECK(run_cli("run-protocol --config " + (dir / "bad.json").string()) == 1);
}

TEST_CASE("CLI seeds produce byte-identical JSON for any worker count") {
  const auto dir = scratch("cli_det");
  const std::string base = "run-protocol --seed 5 --folds 3 --format json --out ";
  REQUIRE(run_cli(base + (dir / "a").string() + " --workers 1") == 0);
  REQUIRE(run_cli(base + (dir / "b").string() + " --workers 4") == 0);
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
}

TEST_CASE("shipped example configs parse") {
  const auto dir = fs::path(PPUI_SOURCE_DIR) / "configs";
  const auto p = protocol_config_from_json(load_json(dir / "protocol.json"), dir);
  CHECK(p.models.size() == 8);
  CHECK(p.group_mode == GroupMode::replication);
  const auto planted = protocol_config_from_json(load_json(dir / "planted_extrinsic.json"), dir);
  CHECK(planted.group_mode == GroupMode::data_driven);
  CHECK(planted.cohort.n == 300);
  CHECK(cohort_config_from_json(load_json(dir / "cohort_small.json")).n == 200);
}
