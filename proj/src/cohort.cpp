#include "ppui/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ppui {

namespace {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool is_target(const std::string& name) {
  return std::find(kPredictionTargets.begin(), kPredictionTargets.end(), name) != kPredictionTargets.end();
}

}  // namespace

void validate(const CohortConfig& config, const Schema& schema) {
  if (config.n < 1) throw ConfigError("cohort size must be at least 1");
  for (const auto& [name, m] : config.marginals) {
    const auto& col = schema.column(name);
    if (const auto* cat = std::get_if<CategoricalMarginal>(&m)) {
      if (!col.categorical()) throw ConfigError("categorical marginal on continuous column " + name);
      if (cat->probabilities.size() != col.level_count()) {
        throw ConfigError("marginal for " + name + " needs " + std::to_string(col.level_count()) + " probabilities");
      }
      double sum = 0.0;
      for (double p : cat->probabilities) {
        if (!(p >= 0.0)) throw ConfigError("negative probability in marginal for " + name);
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9) throw ConfigError("probabilities for " + name + " do not sum to 1");
    } else {
      const auto& c = std::get<ContinuousMarginal>(m);
      if (col.categorical()) throw ConfigError("continuous marginal on categorical column " + name);
      if (!(c.sd >= 0.0) || !(c.min <= c.max)) throw ConfigError("invalid continuous marginal for " + name);
    }
  }
  for (const auto& [target, effect] : config.effects) {
    const auto& col = schema.column(target);
    if (col.role != Role::outcome || !col.categorical()) {
      throw ConfigError("effect target " + target + " must be a categorical outcome");
    }
    for (const auto& [feature, coef] : effect.coefficients) {
      if (schema.column(feature).role == Role::outcome) {
        throw ConfigError("effect on " + target + " references outcome column " + feature);
      }
      if (!std::isfinite(coef)) throw ConfigError("non-finite coefficient for " + feature);
    }
    const auto levels = col.level_count();
    if (levels > 2) {
      if (effect.thresholds.size() != levels - 1) {
        throw ConfigError(target + " needs " + std::to_string(levels - 1) + " thresholds");
      }
      if (!std::is_sorted(effect.thresholds.begin(), effect.thresholds.end(), std::less_equal<>{}) ||
          std::adjacent_find(effect.thresholds.begin(), effect.thresholds.end()) != effect.thresholds.end()) {
        throw ConfigError(target + " thresholds must be strictly increasing");
      }
    } else if (!effect.thresholds.empty()) {
      throw ConfigError(target + " is binary and takes no thresholds");
    }
    if (!(effect.noise_sd >= 0.0)) throw ConfigError("negative noise SD for " + target);
  }
  for (const auto& c : schema.columns()) {
    if (!config.marginals.count(c.name) && !config.effects.count(c.name)) {
      throw ConfigError("cohort config has no marginal or effect for column " + c.name);
    }
  }
}

Dataset generate_cohort(const CohortConfig& config, const Schema& schema) {
  validate(config, schema);
  Rng rng(config.seed);
  const auto n = static_cast<Eigen::Index>(config.n);
  Matrix cells(n, static_cast<Eigen::Index>(schema.size()));

  // features and non-modelled outcomes first, column by column
  for (std::size_t c = 0; c < schema.size(); ++c) {
    const auto& col = schema[c];
    auto it = config.marginals.find(col.name);
    if (config.effects.count(col.name) || it == config.marginals.end()) continue;
    for (Eigen::Index r = 0; r < n; ++r) {
      double v = 0.0;
      if (const auto* cat = std::get_if<CategoricalMarginal>(&it->second)) {
        const double u = uniform01(rng);
        double acc = 0.0;
        std::size_t level = cat->probabilities.size() - 1;
        for (std::size_t l = 0; l < cat->probabilities.size(); ++l) {
          acc += cat->probabilities[l];
          if (u < acc) {
            level = l;
            break;
          }
        }
        // never land on a zero-probability trailing level through rounding
        while (level > 0 && cat->probabilities[level] == 0.0) --level;
        v = static_cast<double>(level);
      } else {
        const auto& m = std::get<ContinuousMarginal>(it->second);
        v = m.mean + m.sd * standard_normal(rng);
        if (m.integer) v = std::round(v);
        v = std::clamp(v, m.min, m.max);
      }
      cells(r, static_cast<Eigen::Index>(c)) = v;
    }
  }

  for (const auto& [target, effect] : config.effects) {
    const auto t = static_cast<Eigen::Index>(schema.index_of(target));
    const auto levels = schema[static_cast<std::size_t>(t)].level_count();
    std::vector<std::pair<Eigen::Index, double>> terms;
    for (const auto& [feature, coef] : effect.coefficients) {
      terms.emplace_back(static_cast<Eigen::Index>(schema.index_of(feature)), coef);
    }
    for (Eigen::Index r = 0; r < n; ++r) {
      double eta = effect.intercept;
      for (const auto& [col, coef] : terms) eta += coef * cells(r, col);
      if (effect.noise_sd > 0.0) eta += effect.noise_sd * standard_normal(rng);
      const double u = uniform01(rng);
      std::size_t level = levels - 1;
      if (levels == 2) {
        level = u < logistic(eta) ? 1 : 0;
      } else {
        for (std::size_t j = 0; j + 1 < levels; ++j) {
          if (u < logistic(effect.thresholds[j] - eta)) {
            level = j;
            break;
          }
        }
      }
      cells(r, t) = static_cast<double>(level);
    }
  }
  return Dataset(schema, std::move(cells));
}

namespace {

std::map<std::string, Marginal> default_marginals() {
  auto c = [](std::vector<double> p) -> Marginal { return CategoricalMarginal{std::move(p)}; };
  auto r = [](double mean, double sd, double lo, double hi, bool integer = false) -> Marginal {
    return ContinuousMarginal{mean, sd, lo, hi, integer};
  };
  return {
      {"AGE", r(32.0, 4.5, 18.0, 40.0, true)},
      {"NUM_LABOURS", r(0.6, 0.8, 0.0, 4.0, true)},
      {"DIC_NULLIPAROUS", c({0.55, 0.45})},
      {"HEIGHT", r(163.0, 6.0, 145.0, 185.0)},
      {"WEIGHT", r(64.0, 10.0, 42.0, 110.0)},
      {"BMI", r(23.8, 3.6, 16.0, 40.0)},
      {"CAT_BMI", c({0.06, 0.70, 0.24})},
      {"EXTRA_KG", r(12.5, 4.0, 0.0, 25.0)},
      {"CAT_EXTRAKG", c({0.30, 0.45, 0.20, 0.05})},
      {"LABOUR_PREP", c({0.35, 0.65})},
      {"PROF_CHBPR", c({0.35, 0.45, 0.20})},
      {"PA_PREV", c({0.40, 0.60})},
      {"FREQ_PAPREV", c({0.40, 0.35, 0.25})},
      {"IPAQ", c({0.35, 0.45, 0.20})},
      {"WALKING", c({0.25, 0.75})},
      {"STRENGTH", c({0.80, 0.20})},
      {"PILATES", c({0.75, 0.25})},
      {"AQUAGYM", c({0.80, 0.20})},
      {"NUM_PA", r(1.2, 1.0, 0.0, 5.0, true)},
      {"WEEK_LABOUR", r(39.5, 1.2, 37.0, 42.0, true)},
      {"INJURY", c({0.45, 0.55})},
      {"EPISIOTOMY", c({0.70, 0.30})},
      {"TEARING", c({0.50, 0.40, 0.10})},
      {"DURATION", r(8.0, 4.0, 1.0, 24.0)},
      {"LITOTHOMY", c({0.30, 0.70})},
      {"POSTURE", c({0.70, 0.15, 0.10, 0.05})},
      {"ANALGESIA", c({0.25, 0.75})},
      {"TYPE_ANALGESIA", c({0.25, 0.05, 0.65, 0.05})},
      {"TYPE_LABOUR", c({0.80, 0.10, 0.10})},
      {"KRISTELLER", c({0.85, 0.15})},
      {"WEIGHT_BABY", r(3300.0, 420.0, 2200.0, 4700.0)},
      {"VAS_PERINE", r(2.0, 2.0, 0.0, 10.0, true)},
      {"AFFECT_UI", c({0.75, 0.25})},
      {"BLADD_HYPER", c({0.85, 0.15})},
      {"UI_PREV", c({0.80, 0.10, 0.10})},
  };
}

}  // namespace

CohortConfig default_cohort_config(std::size_t n, std::uint64_t seed) {
  CohortConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.marginals = default_marginals();
  // mild lifestyle effects, weaker obstetric ones
  const std::vector<std::pair<std::string, double>> base = {
      {"AQUAGYM", -1.2}, {"STRENGTH", -0.8}, {"WEIGHT", 0.04}, {"EXTRA_KG", 0.06},
      {"NUM_LABOURS", 0.4}, {"KRISTELLER", 0.5}, {"EPISIOTOMY", 0.3}};
  cfg.effects["UI"] = {base, -3.6, 0.5, {}};
  cfg.effects["STRESS_UI"] = {base, -4.6, 0.5, {}};
  cfg.effects["FREQ_UI"] = {base, 0.0, 0.5, {3.6, 5.6}};
  cfg.effects["INT_UI"] = {base, 0.0, 0.5, {3.6, 4.8, 6.2}};
  return cfg;
}

CohortConfig planted_extrinsic_config(std::size_t n, std::uint64_t seed) {
  CohortConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  cfg.marginals = default_marginals();
  cfg.marginals["AQUAGYM"] = CategoricalMarginal{{0.6, 0.4}};
  cfg.marginals["STRENGTH"] = CategoricalMarginal{{0.6, 0.4}};
  cfg.marginals["PILATES"] = CategoricalMarginal{{0.6, 0.4}};
  const std::vector<std::pair<std::string, double>> planted = {{"AQUAGYM", 3.0}, {"STRENGTH", 3.0}, {"PILATES", 3.0}};
  cfg.effects["UI"] = {planted, -3.0, 0.0, {}};
  cfg.effects["STRESS_UI"] = {planted, -4.0, 0.0, {}};
  cfg.effects["FREQ_UI"] = {planted, 0.0, 0.0, {2.0, 5.0}};
  cfg.effects["INT_UI"] = {planted, 0.0, 0.0, {1.5, 4.0, 7.0}};
  return cfg;
}

nlohmann::json to_json(const CohortConfig& config) {
  nlohmann::json marginals = nlohmann::json::object();
  for (const auto& [name, m] : config.marginals) {
    if (const auto* cat = std::get_if<CategoricalMarginal>(&m)) {
      marginals[name] = {{"kind", "categorical"}, {"probabilities", cat->probabilities}};
    } else {
      const auto& c = std::get<ContinuousMarginal>(m);
      marginals[name] = {{"kind", "continuous"}, {"mean", c.mean}, {"sd", c.sd},
                         {"min", c.min},         {"max", c.max},   {"integer", c.integer}};
    }
  }
  nlohmann::json effects = nlohmann::json::object();
  for (const auto& [target, e] : config.effects) {
    nlohmann::json coefs = nlohmann::json::array();
    for (const auto& [f, v] : e.coefficients) coefs.push_back({{"feature", f}, {"coefficient", v}});
    effects[target] = {{"coefficients", coefs},
                       {"intercept", e.intercept},
                       {"noise_sd", e.noise_sd},
                       {"thresholds", e.thresholds}};
  }
  return {{"n", config.n}, {"seed", config.seed}, {"marginals", marginals}, {"effects", effects}};
}

CohortConfig cohort_config_from_json(const nlohmann::json& j) {
  try {
    CohortConfig cfg;
    // start from the shipped defaults so partial configs stay valid
    const auto preset = j.value("preset", std::string("default"));
    cfg = preset == "planted-extrinsic" ? planted_extrinsic_config() : default_cohort_config();
    if (preset != "default" && preset != "planted-extrinsic") throw ConfigError("unknown cohort preset " + preset);
    cfg.n = j.value("n", cfg.n);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("marginals")) {
      for (const auto& [name, m] : j.at("marginals").items()) {
        if (m.at("kind").get<std::string>() == "categorical") {
          cfg.marginals[name] = CategoricalMarginal{m.at("probabilities").get<std::vector<double>>()};
        } else {
          ContinuousMarginal c;
          c.mean = m.at("mean").get<double>();
          c.sd = m.at("sd").get<double>();
          c.min = m.value("min", c.min);
          c.max = m.value("max", c.max);
          c.integer = m.value("integer", false);
          cfg.marginals[name] = c;
        }
      }
    }
    if (j.contains("effects")) {
      for (const auto& [target, e] : j.at("effects").items()) {
        EffectSpec spec;
        for (const auto& c : e.at("coefficients")) {
          spec.coefficients.emplace_back(c.at("feature").get<std::string>(), c.at("coefficient").get<double>());
        }
        spec.intercept = e.value("intercept", 0.0);
        spec.noise_sd = e.value("noise_sd", 0.0);
        spec.thresholds = e.value("thresholds", std::vector<double>{});
        cfg.effects[target] = spec;
      }
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed cohort config: ") + e.what());
  }
}

}  // namespace ppui
