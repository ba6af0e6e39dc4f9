// ppui: run the evaluation protocol, generate cohorts, verify the published
// statistics and re-render reports.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 data error,
// 3 verification failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ppui/cohort.hpp"
#include "ppui/fixture.hpp"
#include "ppui/harness.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitVerification = 3;

struct RunOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> folds;
  std::string out;
  std::vector<std::string> formats;
  std::string groups;
  std::string averaging;
  std::optional<unsigned> workers;
  std::string data;
  std::string schema;
};

int run_protocol_cmd(const RunOptions& o) {
  ppui::ProtocolConfig cfg = o.config.empty() ? ppui::ProtocolConfig{} : ppui::load_protocol_config(o.config);
  if (!o.data.empty()) cfg.csv = o.data;
  if (!o.schema.empty()) cfg.schema = o.schema;
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.cohort.seed = *o.seed;
  }
  if (o.folds) cfg.folds = *o.folds;
  if (!o.groups.empty()) cfg.group_mode = ppui::group_mode_from_string(o.groups);
  if (!o.averaging.empty()) {
    for (const auto& t : cfg.targets) cfg.averaging[t] = ppui::averaging_from_string(o.averaging);
  }
  if (o.workers) cfg.workers = *o.workers;
  std::vector<ppui::ReportFormat> formats;
  for (const auto& f : o.formats) formats.push_back(ppui::report_format_from_string(f));
  if (formats.empty()) formats.push_back(ppui::ReportFormat::json);
  ppui::validate(cfg);

  const auto report = ppui::run_protocol(cfg);
  if (o.out.empty()) {
    for (auto f : formats) std::cout << ppui::render_report(report, f);
  } else {
    for (auto f : formats) std::cerr << "wrote " << ppui::emit_report(report, f, o.out).string() << '\n';
  }
  std::cerr << report.cv_executions << " cross-validation runs, " << report.cells_skipped << " skipped cells\n";
  return 0;
}

int generate_cohort_cmd(const std::string& config, std::optional<std::uint64_t> seed, std::optional<std::size_t> n,
                        const std::string& preset, const std::string& out) {
  ppui::CohortConfig cfg;
  if (!config.empty()) {
    std::ifstream in(config);
    if (!in) throw ppui::ConfigError("cannot open cohort config " + config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ppui::ConfigError("cohort config is not valid JSON: " + std::string(e.what()));
    }
    cfg = ppui::cohort_config_from_json(j);
  } else if (preset == "planted-extrinsic") {
    cfg = ppui::planted_extrinsic_config();
  } else if (preset == "default") {
    cfg = ppui::default_cohort_config();
  } else {
    throw ppui::ConfigError("unknown cohort preset '" + preset + "'");
  }
  if (seed) cfg.seed = *seed;
  if (n) cfg.n = *n;
  const auto data = ppui::generate_cohort(cfg);
  if (out.empty() || out == "-") {
    ppui::write_csv(std::cout, data);
  } else {
    ppui::save_csv(out, data);
    std::cerr << "wrote " << data.rows() << " rows to " << out << '\n';
  }
  return 0;
}

int verify_cmd(bool strict, const std::string& out) {
  const auto rep = ppui::verify_paper_stats(ppui::published_fixture());
  std::cout << ppui::render(rep);
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / "verification.json");
    if (!f) throw ppui::ConfigError("cannot write verification.json under " + out);
    f << ppui::to_json(rep).dump(2) << '\n';
  }
  if (!rep.passed()) return kExitVerification;
  if (strict && !rep.discrepancies.empty()) return kExitVerification;
  return 0;
}

int report_cmd(const std::string& input, const std::vector<std::string>& formats, const std::string& out) {
  const auto report = ppui::load_report(input);
  std::vector<std::string> fs = formats.empty() ? std::vector<std::string>{"markdown-table"} : formats;
  for (const auto& name : fs) {
    const auto f = ppui::report_format_from_string(name);
    if (out.empty()) {
      std::cout << ppui::render_report(report, f);
    } else {
      std::cerr << "wrote " << ppui::emit_report(report, f, out).string() << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Postpartum urinary incontinence classifier toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ppui::kToolkitVersion));

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run-protocol", "Cross-validate every target x model x feature group");
  run_cmd->add_option("--config", run.config, "Protocol config JSON")->check(CLI::ExistingFile);
  run_cmd->add_option("--data", run.data, "Cohort CSV (default: synthetic cohort)")->check(CLI::ExistingFile);
  run_cmd->add_option("--schema", run.schema, "Schema JSON for --data")->check(CLI::ExistingFile);
  run_cmd->add_option("--seed", run.seed, "Master seed (also seeds the synthetic cohort)");
  run_cmd->add_option("--folds", run.folds, "Cross-validation folds (default 10)");
  run_cmd->add_option("--out", run.out, "Output directory (default: stdout)");
  run_cmd->add_option("--format", run.formats, "csv, markdown-table or json; repeatable");
  run_cmd->add_option("--groups", run.groups, "replication or data-driven");
  run_cmd->add_option("--f1-averaging", run.averaging, "binary, macro or weighted for every target");
  run_cmd->add_option("--workers", run.workers, "Worker threads");

  std::string cohort_config, cohort_out, preset = "default";
  std::optional<std::uint64_t> cohort_seed;
  std::optional<std::size_t> cohort_n;
  auto* gen_cmd = app.add_subcommand("generate-cohort", "Write a synthetic cohort CSV");
  gen_cmd->add_option("--config", cohort_config, "Cohort config JSON")->check(CLI::ExistingFile);
  gen_cmd->add_option("--preset", preset, "default or planted-extrinsic");
  gen_cmd->add_option("--seed", cohort_seed, "Seed");
  gen_cmd->add_option("--n", cohort_n, "Rows");
  gen_cmd->add_option("--out", cohort_out, "CSV path (default: stdout)");

  bool strict = false;
  std::string verify_out;
  auto* verify = app.add_subcommand("verify-paper", "Recompute the published summary statistics");
  verify->add_flag("--strict", strict, "Also fail on flagged discrepancies");
  verify->add_option("--out", verify_out, "Directory for verification.json");

  std::string report_in, report_out;
  std::vector<std::string> report_formats;
  auto* rep = app.add_subcommand("report", "Re-render a JSON report");
  rep->add_option("--input", report_in, "report.json from run-protocol")->required()->check(CLI::ExistingFile);
  rep->add_option("--format", report_formats, "csv, markdown-table or json; repeatable");
  rep->add_option("--out", report_out, "Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run_protocol_cmd(run);
    if (*gen_cmd) return generate_cohort_cmd(cohort_config, cohort_seed, cohort_n, preset, cohort_out);
    if (*verify) return verify_cmd(strict, verify_out);
    if (*rep) return report_cmd(report_in, report_formats, report_out);
  } catch (const ppui::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ppui::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ppui::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
