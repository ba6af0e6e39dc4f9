#include "ppui/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

namespace ppui {

void validate(const ProtocolConfig& config) {
  if (config.folds < 2) throw ConfigError("folds must be at least 2");
  if (config.workers < 1) throw ConfigError("workers must be at least 1");
  for (const auto& t : config.targets) {
    if (std::find(kPredictionTargets.begin(), kPredictionTargets.end(), t) == kPredictionTargets.end()) {
      throw ConfigError("unknown prediction target '" + t + "'");
    }
  }
  for (std::size_t i = 0; i < config.models.size(); ++i) {
    if (std::count(config.models.begin(), config.models.end(), config.models[i]) > 1) {
      throw ConfigError("model " + std::string(to_string(config.models[i])) + " listed twice");
    }
  }
  for (const auto& [target, avg] : config.averaging) {
    if (std::find(kPredictionTargets.begin(), kPredictionTargets.end(), target) == kPredictionTargets.end()) {
      throw ConfigError("F1 averaging given for unknown target '" + target + "'");
    }
  }
  if (!config.csv) validate(config.cohort);
}

nlohmann::json to_json(const ProtocolConfig& c) {
  nlohmann::json j;
  if (c.csv) j["data"]["csv"] = c.csv->string();
  if (c.schema) j["data"]["schema"] = c.schema->string();
  if (!c.csv) j["cohort"] = to_json(c.cohort);
  j["targets"] = c.targets;
  j["models"] = nlohmann::json::array();
  for (auto m : c.models) j["models"].push_back(to_string(m));
  j["groups"] = to_string(c.group_mode);
  j["folds"] = c.folds;
  j["stratified"] = c.stratified;
  j["seed"] = c.seed;
  j["f1_averaging"] = nlohmann::json::object();
  for (const auto& [t, a] : c.averaging) j["f1_averaging"][t] = to_string(a);
  return j;
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& j, const std::filesystem::path& base) {
  try {
    ProtocolConfig c;
    if (!j.is_object()) throw ConfigError("protocol config must be a JSON object");
    auto resolve = [&](const std::string& p) {
      std::filesystem::path path(p);
      return path.is_relative() && !base.empty() ? base / path : path;
    };
    if (j.contains("data")) {
      const auto& d = j.at("data");
      if (d.contains("csv")) c.csv = resolve(d.at("csv").get<std::string>());
      if (d.contains("schema")) c.schema = resolve(d.at("schema").get<std::string>());
    }
    if (j.contains("cohort")) c.cohort = cohort_config_from_json(j.at("cohort"));
    if (j.contains("targets")) c.targets = j.at("targets").get<std::vector<std::string>>();
    if (j.contains("models")) {
      c.models.clear();
      for (const auto& m : j.at("models")) c.models.push_back(model_from_string(m.get<std::string>()));
    }
    if (j.contains("groups")) c.group_mode = group_mode_from_string(j.at("groups").get<std::string>());
    c.folds = j.value("folds", c.folds);
    c.stratified = j.value("stratified", c.stratified);
    c.seed = j.value("seed", c.seed);
    if (j.contains("f1_averaging")) {
      const auto& a = j.at("f1_averaging");
      if (a.is_string()) {
        for (const auto& t : c.targets) c.averaging[t] = averaging_from_string(a.get<std::string>());
      } else {
        for (const auto& [t, v] : a.items()) c.averaging[t] = averaging_from_string(v.get<std::string>());
      }
    }
    c.workers = j.value("workers", c.workers);
    for (const auto& [key, value] : j.items()) {
      static const std::vector<std::string> known = {"data",   "cohort", "targets",    "models",      "groups",
                                                     "folds",  "seed",   "stratified", "f1_averaging", "workers"};
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        throw ConfigError("unknown protocol config key '" + key + "'");
      }
    }
    validate(c);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed protocol config: ") + e.what());
  }
}

ProtocolConfig load_protocol_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return protocol_config_from_json(j, path.parent_path());
}

Averaging default_averaging(const Schema& schema, std::string_view target) {
  return schema.column(target).level_count() == 2 ? Averaging::binary : Averaging::weighted;
}

F1Grid ExperimentReport::grid() const {
  F1Grid g;
  for (const auto& cell : cells) {
    if (g.rows.empty() || g.rows.back().target != cell.target || g.rows.back().model != cell.model) {
      g.rows.push_back({cell.target, cell.model, {}});
    }
    const auto col = static_cast<std::size_t>(std::find(kGroupOrder.begin(), kGroupOrder.end(), cell.group) -
                                              kGroupOrder.begin());
    if (!cell.skipped) g.rows.back().f1[col] = cell.mean_f1;
  }
  return g;
}

void summarize(ExperimentReport& report) {
  const auto grid = report.grid();
  const Matrix m = grid.matrix();
  GroupStats stats;
  for (std::size_t j = 0; j < 6; ++j) {
    std::vector<double> col;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!std::isnan(m(i, static_cast<Eigen::Index>(j)))) col.push_back(m(i, static_cast<Eigen::Index>(j)));
    }
    if (col.empty()) continue;
    stats.groups.push_back(
        {std::string(to_string(kGroupOrder[j])), col.size(), mean(col), col.size() > 1 ? sample_sd(col) : 0.0});
  }
  report.stats.reset();
  if (!stats.groups.empty()) report.stats = stats;

  report.ttests.clear();
  const std::array<std::pair<std::size_t, std::size_t>, 2> pairs = {{{0, 2}, {1, 3}}};
  for (const auto& [ia, ib] : pairs) {
    NamedTTest t{kGroupOrder[ia], kGroupOrder[ib], std::nullopt, {}};
    std::vector<double> a, b;
    for (const auto& r : grid.rows) {
      if (r.f1[ia] && r.f1[ib]) {
        a.push_back(*r.f1[ia]);
        b.push_back(*r.f1[ib]);
      }
    }
    try {
      t.result = t_test(a, b, TTestKind::paired);
    } catch (const ConfigError& e) {
      t.note = e.what();
    }
    report.ttests.push_back(std::move(t));
  }
}

Dataset load_protocol_data(const ProtocolConfig& config) {
  if (!config.csv) return generate_cohort(config.cohort);
  const Schema schema = config.schema ? load_schema(*config.schema) : cohort_schema();
  return load_csv(*config.csv, schema);
}

ExperimentReport run_protocol(const ProtocolConfig& config) {
  validate(config);
  return run_protocol(config, load_protocol_data(config));
}

ExperimentReport run_protocol(const ProtocolConfig& config, const Dataset& data) {
  validate(config);
  const Schema& schema = data.schema();
  require_prediction_targets(schema);

  ExperimentReport report;
  report.config = to_json(config);
  report.seed = config.seed;
  report.folds = config.folds;
  report.group_mode = config.group_mode;
  report.rows = data.rows();
  report.models = config.models;

  struct TargetPlan {
    Labels y;
    FoldAssignment folds;
    std::array<FeatureGroupSpec, 6> groups;
    std::array<FeatureMatrix, 6> matrices;
  };
  std::vector<TargetPlan> plans;
  for (const auto& target : config.targets) {
    TargetPlan plan;
    plan.y = data.labels(target);
    plan.folds = make_folds(plan.y, config.folds, derive_seed(config.seed, "folds/" + target), config.stratified);
    plan.groups = build_groups(schema, target, config.group_mode, &data);
    TargetInfo info;
    info.name = target;
    const auto it = config.averaging.find(target);
    info.averaging = it != config.averaging.end() ? it->second : default_averaging(schema, target);
    for (std::size_t g = 0; g < 6; ++g) {
      info.groups.push_back(plan.groups[g]);
      if (plan.groups[g].executable()) plan.matrices[g] = project_group(data, plan.groups[g]);
    }
    report.targets.push_back(std::move(info));
    plans.push_back(std::move(plan));
  }

  for (std::size_t t = 0; t < plans.size(); ++t) {
    for (auto model : config.models) {
      for (std::size_t g = 0; g < 6; ++g) {
        RunCell cell;
        cell.target = config.targets[t];
        cell.model = model;
        cell.group = kGroupOrder[g];
        const auto& spec = plans[t].groups[g];
        cell.members = spec.members;
        if (!spec.executable()) {
          cell.skipped = true;
          std::string names;
          for (const auto& p : spec.placeholders) names += (names.empty() ? "" : ", ") + p;
          cell.reason = "group has members with no schema column: " + names;
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> executions{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= report.cells.size()) return;
      auto& cell = report.cells[i];
      if (cell.skipped) continue;
      try {
        const std::size_t t = i / (config.models.size() * 6);
        const std::size_t g = i % 6;
        const auto& info = report.targets[t];
        const auto spec = make_spec(cell.model);
        const auto run_seed = derive_seed(
            config.seed, cell.target + "/" + std::string(to_string(cell.model)) + "/" + std::string(to_string(cell.group)));
        auto result = grid_search(spec, plans[t].matrices[g], plans[t].y, plans[t].folds, info.averaging, run_seed);
        executions.fetch_add(1);
        cell.mean_f1 = result.mean_f1;
        cell.fold_f1 = result.fold_f1;
        cell.params = to_json(result.params);
        cell.params["summary"] = describe(result.params);
        cell.evaluations = result.evaluations;
        cell.notes = result.notes;
        cell.leakage_audit_passed = audit_no_leakage(result);
        cell.detail = std::move(result);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(report.cells.size());
        return;
      }
    }
  };
  const unsigned n_workers = std::max(1u, std::min<unsigned>(config.workers, static_cast<unsigned>(report.cells.size())));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.cv_executions = executions.load();
  report.cells_skipped = static_cast<std::size_t>(
      std::count_if(report.cells.begin(), report.cells.end(), [](const RunCell& c) { return c.skipped; }));
  if (report.cv_executions + report.cells_skipped != config.targets.size() * config.models.size() * 6) {
    throw Error("protocol bookkeeping: cross-validation count does not cover every cell");
  }
  for (const auto& info : report.targets) {
    for (const auto& g : info.groups) {
      for (const auto& n : g.notes) report.notes.push_back(info.name + " " + std::string(to_string(g.name)) + ": " + n);
      if (!g.executable()) {
        report.notes.push_back(info.name + " " + std::string(to_string(g.name)) + ": skipped, placeholder members");
      }
    }
  }
  summarize(report);
  return report;
}

}  // namespace ppui
