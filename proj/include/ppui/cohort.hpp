#pragma once

// Synthetic cohorts that conform to the cohort schema, with planted
// dependence of the prediction targets on chosen features.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ppui/tabular.hpp"

namespace ppui {

struct CategoricalMarginal {
  std::vector<double> probabilities;  // one per level
};

/// Normal(mean, sd) clamped to [min, max], optionally rounded.
struct ContinuousMarginal {
  double mean = 0.0;
  double sd = 1.0;
  double min = -1e300;
  double max = 1e300;
  bool integer = false;
};

using Marginal = std::variant<CategoricalMarginal, ContinuousMarginal>;

/// Linear predictor on the log-odds scale: intercept + sum coef * value
/// (level index for categorical features) + Normal(0, noise_sd).
struct EffectSpec {
  std::vector<std::pair<std::string, double>> coefficients;
  double intercept = 0.0;
  double noise_sd = 0.0;
  /// Cumulative-logit cut points for targets with more than two levels.
  std::vector<double> thresholds;
};

struct CohortConfig {
  std::size_t n = 93;
  std::uint64_t seed = 0;
  std::map<std::string, Marginal> marginals;
  std::map<std::string, EffectSpec> effects;
};

/// Throws ConfigError when the config does not fit the schema.
void validate(const CohortConfig& config, const Schema& schema = cohort_schema());

Dataset generate_cohort(const CohortConfig& config, const Schema& schema = cohort_schema());

/// Plausible marginals and mild effects. Synthetic; not the study cohort.
CohortConfig default_cohort_config(std::size_t n = 93, std::uint64_t seed = 0);
/// Every target depends on AQUAGYM, STRENGTH and PILATES only.
CohortConfig planted_extrinsic_config(std::size_t n = 300, std::uint64_t seed = 0);

nlohmann::json to_json(const CohortConfig& config);
CohortConfig cohort_config_from_json(const nlohmann::json& j);

}  // namespace ppui
