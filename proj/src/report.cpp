#include <cstdio>
#include <fstream>
#include <sstream>

#include "ppui/harness.hpp"

namespace ppui {

std::string_view to_string(ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown_table: return "markdown-table";
    case ReportFormat::json: return "json";
  }
  return "?";
}

ReportFormat report_format_from_string(std::string_view text) {
  if (text == "csv") return ReportFormat::csv;
  if (text == "markdown-table" || text == "markdown") return ReportFormat::markdown_table;
  if (text == "json") return ReportFormat::json;
  throw ConfigError("unknown report format '" + std::string(text) + "'");
}

std::string_view extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::csv: return "csv";
    case ReportFormat::markdown_table: return "md";
    case ReportFormat::json: return "json";
  }
  return "txt";
}

namespace {

std::string two(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string four(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string params_summary(const RunCell& c) {
  if (c.params.is_object() && c.params.contains("summary")) return c.params.at("summary").get<std::string>();
  return {};
}

std::string render_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << "target,model,group,status,mean_f1";
  for (int f = 1; f <= r.folds; ++f) out << ",fold_" << f;
  out << ",params\n";
  for (const auto& c : r.cells) {
    out << c.target << ',' << csv_field(std::string(to_string(c.model))) << ',' << to_string(c.group) << ','
        << (c.skipped ? "skipped" : "ok") << ',' << (c.skipped ? "" : two(c.mean_f1));
    for (int f = 0; f < r.folds; ++f) {
      out << ',';
      if (static_cast<std::size_t>(f) < c.fold_f1.size()) out << two(c.fold_f1[static_cast<std::size_t>(f)]);
    }
    out << ',' << csv_field(params_summary(c)) << '\n';
  }
  return out.str();
}

std::string render_markdown(const ExperimentReport& r) {
  std::ostringstream out;
  out << "# Experiment report\n\n";
  out << "Toolkit " << r.toolkit_version << ", seed " << r.seed << ", " << r.folds << " folds, groups "
      << to_string(r.group_mode) << ", " << r.rows << " rows.\n\n";
  out << "## F1 by model and feature group\n\n";
  out << "| Target | Model |";
  for (auto g : kGroupOrder) out << ' ' << heading(g) << " |";
  out << "\n|---|---|";
  for (std::size_t i = 0; i < kGroupOrder.size(); ++i) out << "---:|";
  out << '\n';
  for (const auto& row : r.grid().rows) {
    out << "| " << row.target << " | " << to_string(row.model) << " |";
    for (const auto& v : row.f1) out << ' ' << (v ? two(*v) : "n/a") << " |";
    out << '\n';
  }

  out << "\n## Group statistics\n\n| Group | N | Mean | SD |\n|---|---:|---:|---:|\n";
  if (r.stats) {
    for (const auto& g : r.stats->groups) {
      out << "| " << heading(group_from_string(g.name)) << " | " << g.n << " | " << two(g.mean) << " | " << two(g.sd)
          << " |\n";
    }
  }

  out << "\n## Paired t-tests\n\n| Comparison | t | df | p |\n|---|---:|---:|---:|\n";
  for (const auto& t : r.ttests) {
    out << "| " << heading(t.a) << " vs " << heading(t.b) << " | ";
    if (t.result) {
      out << two(t.result->t) << " | " << t.result->df << " | " << four(t.result->p) << " |\n";
    } else {
      out << "n/a | n/a | n/a |\n";
    }
  }

  out << "\n## Top models\n\n| Target | Group | Model | F1 |\n|---|---|---|---:|\n";
  for (const auto& [target, entries] : top_models(r.grid(), 3)) {
    for (const auto& e : entries) {
      out << "| " << target << " | " << heading(e.group) << " | " << to_string(e.model) << " | " << two(e.f1)
          << " |\n";
    }
  }

  if (!r.notes.empty()) {
    out << "\n## Notes\n\n";
    for (const auto& n : r.notes) out << "- " << n << '\n';
  }
  return out.str();
}

}  // namespace

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["toolkit_version"] = r.toolkit_version;
  j["config"] = r.config;
  j["seed"] = r.seed;
  j["folds"] = r.folds;
  j["group_mode"] = to_string(r.group_mode);
  j["rows"] = r.rows;
  j["targets"] = nlohmann::json::array();
  for (const auto& t : r.targets) {
    nlohmann::json tj{{"name", t.name}, {"f1_averaging", to_string(t.averaging)}, {"groups", nlohmann::json::array()}};
    for (const auto& g : t.groups) tj["groups"].push_back(to_json(g));
    j["targets"].push_back(tj);
  }
  j["models"] = nlohmann::json::array();
  for (auto m : r.models) j["models"].push_back(to_string(m));
  j["cells"] = nlohmann::json::array();
  for (const auto& c : r.cells) {
    nlohmann::json cj{{"target", c.target},
                      {"model", to_string(c.model)},
                      {"group", to_string(c.group)},
                      {"status", c.skipped ? "skipped" : "ok"},
                      {"members", c.members}};
    if (c.skipped) {
      cj["reason"] = c.reason;
    } else {
      cj["mean_f1"] = c.mean_f1;
      cj["fold_f1"] = c.fold_f1;
      cj["params"] = c.params;
      cj["evaluations"] = c.evaluations;
      cj["notes"] = c.notes;
      cj["leakage_audit_passed"] = c.leakage_audit_passed;
    }
    j["cells"].push_back(cj);
  }
  j["group_stats"] = nlohmann::json::array();
  if (r.stats) {
    for (const auto& g : r.stats->groups) {
      j["group_stats"].push_back({{"group", g.name}, {"n", g.n}, {"mean", g.mean}, {"sd", g.sd}});
    }
  }
  j["t_tests"] = nlohmann::json::array();
  for (const auto& t : r.ttests) {
    nlohmann::json tj{{"a", to_string(t.a)}, {"b", to_string(t.b)}};
    if (t.result) {
      tj["result"] = to_json(*t.result);
    } else {
      tj["note"] = t.note;
    }
    j["t_tests"].push_back(tj);
  }
  j["top_models"] = nlohmann::json::object();
  for (const auto& [target, entries] : top_models(r.grid(), 3)) {
    j["top_models"][target] = nlohmann::json::array();
    for (const auto& e : entries) j["top_models"][target].push_back(to_json(e));
  }
  j["cv_executions"] = r.cv_executions;
  j["cells_skipped"] = r.cells_skipped;
  j["notes"] = r.notes;
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  try {
    ExperimentReport r;
    r.toolkit_version = j.at("toolkit_version").get<std::string>();
    r.config = j.value("config", nlohmann::json::object());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.folds = j.at("folds").get<int>();
    r.group_mode = group_mode_from_string(j.at("group_mode").get<std::string>());
    r.rows = j.value("rows", std::size_t{0});
    for (const auto& tj : j.at("targets")) {
      TargetInfo t;
      t.name = tj.at("name").get<std::string>();
      t.averaging = averaging_from_string(tj.at("f1_averaging").get<std::string>());
      for (const auto& g : tj.at("groups")) t.groups.push_back(group_from_json(g));
      r.targets.push_back(std::move(t));
    }
    for (const auto& m : j.at("models")) r.models.push_back(model_from_string(m.get<std::string>()));
    for (const auto& cj : j.at("cells")) {
      RunCell c;
      c.target = cj.at("target").get<std::string>();
      c.model = model_from_string(cj.at("model").get<std::string>());
      c.group = group_from_string(cj.at("group").get<std::string>());
      c.members = cj.value("members", std::vector<std::string>{});
      const auto status = cj.at("status").get<std::string>();
      if (status != "ok" && status != "skipped") throw DataError("unknown cell status '" + status + "'");
      c.skipped = status == "skipped";
      if (c.skipped) {
        c.reason = cj.value("reason", std::string{});
      } else {
        c.mean_f1 = cj.at("mean_f1").get<double>();
        c.fold_f1 = cj.at("fold_f1").get<std::vector<double>>();
        c.params = cj.value("params", nlohmann::json());
        c.evaluations = cj.value("evaluations", std::size_t{1});
        c.notes = cj.value("notes", std::vector<std::string>{});
        c.leakage_audit_passed = cj.value("leakage_audit_passed", true);
      }
      r.cells.push_back(std::move(c));
    }
    r.cv_executions = j.value("cv_executions", std::size_t{0});
    r.cells_skipped = j.value("cells_skipped", std::size_t{0});
    r.notes = j.value("notes", std::vector<std::string>{});
    summarize(r);
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open report " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("report " + path.string() + " is not valid JSON: " + e.what());
  }
  return report_from_json(j);
}

std::string render_report(const ExperimentReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return render_csv(report);
    case ReportFormat::markdown_table: return render_markdown(report);
    case ReportFormat::json: return to_json(report).dump(2) + "\n";
  }
  return {};
}

std::filesystem::path emit_report(const ExperimentReport& report, ReportFormat format,
                                  const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / ("report." + std::string(extension(format)));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << render_report(report, format);
  return path;
}

}  // namespace ppui
