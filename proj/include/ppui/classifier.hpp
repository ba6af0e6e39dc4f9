#pragma once

// The eight model configurations and a uniform fit/predict surface over them.

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ppui/bayes.hpp"
#include "ppui/neighbors.hpp"
#include "ppui/resample.hpp"
#include "ppui/tree.hpp"

namespace ppui {

enum class ModelId {
  gaussian_nb,
  complement_nb,
  knn,
  dt,
  knn_improved,
  dt_improved,
  knn_imp_randover,
  knn_imp_smote,
};

inline constexpr std::array<ModelId, 8> kModelOrder = {
    ModelId::gaussian_nb, ModelId::complement_nb, ModelId::knn,           ModelId::dt,
    ModelId::knn_improved, ModelId::dt_improved,  ModelId::knn_imp_randover, ModelId::knn_imp_smote};

/// Display name ("KNN imp.randover", ...).
std::string_view to_string(ModelId id);
/// Accepts display names and snake_case ids.
ModelId model_from_string(std::string_view text);

struct GaussianNBParams {
  friend bool operator==(const GaussianNBParams&, const GaussianNBParams&) = default;
};
struct ComplementNBParams {
  double alpha = 1.0;
  friend bool operator==(const ComplementNBParams&, const ComplementNBParams&) = default;
};

using ModelParams = std::variant<GaussianNBParams, ComplementNBParams, KnnParams, TreeParams>;

std::string describe(const ModelParams& p);
nlohmann::json to_json(const ModelParams& p);

enum class Oversampler { none, random, smote };
std::string_view to_string(Oversampler o);

struct ClassifierSpec {
  ModelId id = ModelId::gaussian_nb;
  ModelParams params = GaussianNBParams{};
  Oversampler oversampler = Oversampler::none;
  /// Candidate parameters for tuned variants, evaluated in order.
  std::vector<ModelParams> grid;
  int smote_k = kSmoteNeighbors;

  bool tuned() const { return !grid.empty(); }
};

/// Default configuration for each model id, including its default grid.
ClassifierSpec make_spec(ModelId id);
/// Throws ConfigError when oversamplers or grids sit on ids that do not allow them.
void validate(const ClassifierSpec& spec);

std::vector<ModelParams> default_knn_grid();
std::vector<ModelParams> default_tree_grid();

/// Predicts one fixed label; used when a training fold holds a single class.
struct ConstantModel {
  Label label = 0;
};

using TrainedModel = std::variant<GaussianNBModel, ComplementNBModel, KnnModel, TreeModel, ConstantModel>;

TrainedModel fit_model(const ModelParams& params, const Matrix& X, const Labels& y);
Label predict_one(const TrainedModel& model, const Eigen::Ref<const RowVector>& x);
Labels predict(const TrainedModel& model, const Matrix& X);

/// Complement NB consumes min-max scaled inputs; the rest standardized ones.
bool needs_non_negative_inputs(const ModelParams& params);

}  // namespace ppui
