#include "ppui/classifier.hpp"

#include <sstream>

namespace ppui {

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::gaussian_nb: return "GaussianNB";
    case ModelId::complement_nb: return "ComplementNB";
    case ModelId::knn: return "KNN";
    case ModelId::dt: return "DT";
    case ModelId::knn_improved: return "KNN improved";
    case ModelId::dt_improved: return "DT improved";
    case ModelId::knn_imp_randover: return "KNN imp.randover";
    case ModelId::knn_imp_smote: return "KNN imp.SMOTE";
  }
  return "?";
}

ModelId model_from_string(std::string_view text) {
  static const std::array<std::string_view, 8> ids = {"gaussian_nb",  "complement_nb", "knn",
                                                      "dt",           "knn_improved",  "dt_improved",
                                                      "knn_imp_randover", "knn_imp_smote"};
  for (std::size_t i = 0; i < kModelOrder.size(); ++i) {
    if (to_string(kModelOrder[i]) == text || ids[i] == text) return kModelOrder[i];
  }
  throw ConfigError("unknown model '" + std::string(text) + "'");
}

std::string_view to_string(Oversampler o) {
  switch (o) {
    case Oversampler::none: return "none";
    case Oversampler::random: return "randover";
    case Oversampler::smote: return "smote";
  }
  return "?";
}

namespace {

struct Describe {
  std::string operator()(const GaussianNBParams&) const { return "gaussian_nb"; }
  std::string operator()(const ComplementNBParams& p) const {
    std::ostringstream os;
    os << "complement_nb alpha=" << p.alpha;
    return os.str();
  }
  std::string operator()(const KnnParams& p) const {
    return "knn k=" + std::to_string(p.k) +
           " weights=" + (p.weighting == Weighting::uniform ? "uniform" : "distance");
  }
  std::string operator()(const TreeParams& p) const {
    return std::string("tree criterion=") + (p.criterion == Criterion::gini ? "gini" : "entropy") +
           " max_depth=" + (p.max_depth ? std::to_string(*p.max_depth) : "none") +
           " min_samples_split=" + std::to_string(p.min_samples_split);
  }
};

struct ToJson {
  nlohmann::json operator()(const GaussianNBParams&) const { return {{"model", "gaussian_nb"}}; }
  nlohmann::json operator()(const ComplementNBParams& p) const { return {{"model", "complement_nb"}, {"alpha", p.alpha}}; }
  nlohmann::json operator()(const KnnParams& p) const {
    return {{"model", "knn"}, {"k", p.k}, {"weights", p.weighting == Weighting::uniform ? "uniform" : "distance"}};
  }
  nlohmann::json operator()(const TreeParams& p) const {
    nlohmann::json j{{"model", "tree"},
                     {"criterion", p.criterion == Criterion::gini ? "gini" : "entropy"},
                     {"min_samples_split", p.min_samples_split}};
    j["max_depth"] = p.max_depth ? nlohmann::json(*p.max_depth) : nlohmann::json(nullptr);
    return j;
  }
};

}  // namespace

std::string describe(const ModelParams& p) { return std::visit(Describe{}, p); }
nlohmann::json to_json(const ModelParams& p) { return std::visit(ToJson{}, p); }

std::vector<ModelParams> default_knn_grid() {
  std::vector<ModelParams> grid;
  for (int k : {1, 3, 5, 7, 9, 11, 15}) {
    for (auto w : {Weighting::uniform, Weighting::distance}) grid.push_back(KnnParams{k, w});
  }
  return grid;
}

std::vector<ModelParams> default_tree_grid() {
  std::vector<ModelParams> grid;
  const std::array<std::optional<int>, 6> depths = {1, 2, 3, 5, 8, std::nullopt};
  for (auto c : {Criterion::gini, Criterion::entropy}) {
    for (auto d : depths) {
      for (int m : {2, 5, 10}) grid.push_back(TreeParams{c, d, m});
    }
  }
  return grid;
}

ClassifierSpec make_spec(ModelId id) {
  ClassifierSpec s;
  s.id = id;
  switch (id) {
    case ModelId::gaussian_nb: s.params = GaussianNBParams{}; break;
    case ModelId::complement_nb: s.params = ComplementNBParams{}; break;
    case ModelId::knn: s.params = KnnParams{}; break;
    case ModelId::dt: s.params = TreeParams{}; break;
    case ModelId::knn_improved:
      s.params = KnnParams{};
      s.grid = default_knn_grid();
      break;
    case ModelId::dt_improved:
      s.params = TreeParams{};
      s.grid = default_tree_grid();
      break;
    case ModelId::knn_imp_randover:
      s.params = KnnParams{};
      s.grid = default_knn_grid();
      s.oversampler = Oversampler::random;
      break;
    case ModelId::knn_imp_smote:
      s.params = KnnParams{};
      s.grid = default_knn_grid();
      s.oversampler = Oversampler::smote;
      break;
  }
  return s;
}

void validate(const ClassifierSpec& spec) {
  const bool may_oversample = spec.id == ModelId::knn_imp_randover || spec.id == ModelId::knn_imp_smote;
  const bool may_tune = spec.id == ModelId::knn_improved || spec.id == ModelId::dt_improved || may_oversample;
  if (spec.oversampler != Oversampler::none && !may_oversample) {
    throw ConfigError(std::string(to_string(spec.id)) + " does not take an oversampler");
  }
  if (spec.id == ModelId::knn_imp_randover && spec.oversampler != Oversampler::random) {
    throw ConfigError("KNN imp.randover requires random oversampling");
  }
  if (spec.id == ModelId::knn_imp_smote && spec.oversampler != Oversampler::smote) {
    throw ConfigError("KNN imp.SMOTE requires SMOTE");
  }
  if (spec.tuned() && !may_tune) throw ConfigError(std::string(to_string(spec.id)) + " does not take a grid");
  const bool knn_family = spec.id == ModelId::knn || spec.id == ModelId::knn_improved || may_oversample;
  const bool tree_family = spec.id == ModelId::dt || spec.id == ModelId::dt_improved;
  auto family_ok = [&](const ModelParams& p) {
    if (knn_family) return std::holds_alternative<KnnParams>(p);
    if (tree_family) return std::holds_alternative<TreeParams>(p);
    if (spec.id == ModelId::gaussian_nb) return std::holds_alternative<GaussianNBParams>(p);
    return std::holds_alternative<ComplementNBParams>(p);
  };
  if (!family_ok(spec.params)) throw ConfigError(std::string(to_string(spec.id)) + ": parameters of the wrong model");
  for (const auto& p : spec.grid) {
    if (!family_ok(p)) throw ConfigError(std::string(to_string(spec.id)) + ": grid point of the wrong model");
  }
  if (spec.smote_k < 1) throw ConfigError("SMOTE k must be at least 1");
}

namespace {

struct Fit {
  const Matrix& X;
  const Labels& y;
  TrainedModel operator()(const GaussianNBParams&) const { return fit_gaussian_nb(X, y); }
  TrainedModel operator()(const ComplementNBParams& p) const { return fit_complement_nb(X, y, p.alpha); }
  TrainedModel operator()(const KnnParams& p) const { return fit_knn(X, y, p); }
  TrainedModel operator()(const TreeParams& p) const { return fit_tree(X, y, p); }
};

struct Predict {
  const Eigen::Ref<const RowVector>& x;
  Label operator()(const GaussianNBModel& m) const { return predict_gaussian_nb(m, x).label; }
  Label operator()(const ComplementNBModel& m) const { return predict_complement_nb(m, x); }
  Label operator()(const KnnModel& m) const { return knn_predict(m, x).label; }
  Label operator()(const TreeModel& m) const { return predict_tree(m, x); }
  Label operator()(const ConstantModel& m) const { return m.label; }
};

}  // namespace

TrainedModel fit_model(const ModelParams& params, const Matrix& X, const Labels& y) {
  if (y.empty()) throw ConfigError("cannot fit on an empty dataset");
  if (distinct_labels(y).size() == 1) return ConstantModel{y.front()};
  return std::visit(Fit{X, y}, params);
}

Label predict_one(const TrainedModel& model, const Eigen::Ref<const RowVector>& x) {
  return std::visit(Predict{x}, model);
}

Labels predict(const TrainedModel& model, const Matrix& X) {
  Labels out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) out[static_cast<std::size_t>(i)] = predict_one(model, X.row(i));
  return out;
}

bool needs_non_negative_inputs(const ModelParams& params) {
  return std::holds_alternative<ComplementNBParams>(params);
}

}  // namespace ppui
