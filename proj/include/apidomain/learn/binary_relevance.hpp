#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/hash.hpp"
#include "apidomain/common/matrix.hpp"
#include "apidomain/common/parallel.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/learn/dummy.hpp"
#include "apidomain/learn/forest.hpp"
#include "apidomain/learn/logreg.hpp"
#include "apidomain/learn/mlknn.hpp"
#include "apidomain/learn/tree.hpp"

namespace apidomain {

enum class Algorithm { tree, forest, logreg, mlknn, dummy };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::tree: return "tree";
    case Algorithm::forest: return "forest";
    case Algorithm::logreg: return "logreg";
    case Algorithm::mlknn: return "mlknn";
    case Algorithm::dummy: return "dummy";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  const auto v = text::to_lower_ascii(text::trim(s));
  if (v == "tree" || v == "decision_tree" || v == "dt") return Algorithm::tree;
  if (v == "forest" || v == "random_forest" || v == "rf") return Algorithm::forest;
  if (v == "logreg" || v == "logistic_regression" || v == "lr") return Algorithm::logreg;
  if (v == "mlknn" || v == "ml-knn") return Algorithm::mlknn;
  if (v == "dummy") return Algorithm::dummy;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (tree, forest, logreg, mlknn, dummy)");
}

struct LearnerParams {
  TreeParams tree{};
  ForestParams forest{};
  LogregParams logreg{};
  MlknnParams mlknn{};
  bool operator==(const LearnerParams&) const = default;
};

/// Only the block relevant to `a` — so the hash ignores unrelated settings.
inline nlohmann::json params_json(Algorithm a, const LearnerParams& p) {
  switch (a) {
    case Algorithm::tree: return p.tree;
    case Algorithm::forest: return p.forest;
    case Algorithm::logreg: return p.logreg;
    case Algorithm::mlknn: return p.mlknn;
    case Algorithm::dummy: return {{"strategy", "uniform"}};
  }
  return {};
}

inline std::string params_hash(Algorithm a, const LearnerParams& p, std::uint64_t seed) {
  return content_hash(nlohmann::json{{"algorithm", to_string(a)}, {"params", params_json(a, p)}, {"seed", seed}}.dump());
}

/// Stream for one label, keyed by its name so that adding or reordering
/// label columns leaves every other label's model unchanged.
inline std::uint64_t label_seed(std::uint64_t seed, std::string_view label) { return derive_seed(seed, fnv1a64(label)); }

using BaseModel = std::variant<DecisionTree, RandomForest, LogregModel, UniformDummy>;

/// Binary relevance over tree/forest/logreg/dummy (one independent model
/// per label); MLkNN is multi-label natively and is held as a single model.
class MultiLabelModel {
 public:
  static constexpr int kFormatVersion = 1;

  static MultiLabelModel train(const FeatureMatrix& X, const LabelMatrix& Y, const std::vector<std::string>& label_names,
                               Algorithm algo, const LearnerParams& params, std::uint64_t seed, unsigned jobs = 1) {
    if (X.rows() != Y.rows()) throw ParameterError("train: feature and label rows differ");
    if (Y.cols() != label_names.size()) throw ParameterError("train: label names do not match label columns");
    if (Y.cols() == 0) throw EmptyLabelError("train: no label columns");
    MultiLabelModel m;
    m.algorithm_ = algo;
    m.label_names_ = label_names;
    m.params_ = params;
    m.seed_ = seed;
    m.n_features_ = X.cols();

    if (algo != Algorithm::dummy) {
      for (std::size_t l = 0; l < Y.cols(); ++l) {
        bool any = false;
        for (std::size_t r = 0; r < Y.rows() && !any; ++r) any = Y(r, l) != 0;
        if (!any)
          throw EmptyLabelError("label '" + label_names[l] +
                                "' has no positive training rows; it should have been removed by the label filter");
      }
    }

    if (algo == Algorithm::mlknn) {
      m.mlknn_ = Mlknn::train(X, Y, params.mlknn, jobs);
      return m;
    }
    m.models_.resize(Y.cols());
    parallel_for(Y.cols(), jobs, [&](std::size_t l) {
      m.models_[l] = train_base(X, Y.column(l), algo, params, label_seed(seed, label_names[l]));
    });
    return m;
  }

  static BaseModel train_base(const FeatureMatrix& X, const std::vector<std::uint8_t>& y, Algorithm algo,
                              const LearnerParams& params, std::uint64_t seed) {
    switch (algo) {
      case Algorithm::tree: return DecisionTree::train(X, y, params.tree);
      case Algorithm::forest: return RandomForest::train(X, y, params.forest, seed);
      case Algorithm::logreg: return train_logreg(X, y, params.logreg);
      case Algorithm::dummy: return UniformDummy(seed);
      case Algorithm::mlknn: break;
    }
    throw ParameterError("mlknn is not a binary-relevance base learner");
  }

  LabelMatrix predict(const FeatureMatrix& X, unsigned jobs = 1) const {
    check_width(X);
    if (mlknn_) return mlknn_->predict(X, jobs);
    LabelMatrix out(X.rows(), label_names_.size());
    parallel_for(models_.size(), jobs, [&](std::size_t l) {
      const auto col = std::visit(
          [&](const auto& m) -> std::vector<std::uint8_t> {
            if constexpr (std::is_same_v<std::decay_t<decltype(m)>, UniformDummy>) return m.predict(X.rows());
            else return m.predict(X);
          },
          models_[l]);
      for (std::size_t r = 0; r < X.rows(); ++r) out(r, l) = col[r];
    });
    return out;
  }

  /// Per-label positive score where the learner has one (vote share, leaf
  /// frequency, probability, posterior); nullopt for the dummy.
  std::optional<FeatureMatrix> scores(const FeatureMatrix& X, unsigned jobs = 1) const {
    check_width(X);
    if (algorithm_ == Algorithm::dummy) return std::nullopt;
    if (mlknn_) return mlknn_->scores(X, jobs);
    FeatureMatrix out(X.rows(), label_names_.size());
    parallel_for(models_.size(), jobs, [&](std::size_t l) {
      std::visit(
          [&](const auto& m) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, UniformDummy>)
              for (std::size_t r = 0; r < X.rows(); ++r) out(r, l) = m.score_row(X.row(r));
          },
          models_[l]);
    });
    return out;
  }

  Algorithm algorithm() const { return algorithm_; }
  const std::vector<std::string>& label_names() const { return label_names_; }
  const LearnerParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t n_features() const { return n_features_; }
  std::size_t model_count() const { return mlknn_ ? 1 : models_.size(); }
  const std::vector<BaseModel>& base_models() const { return models_; }
  std::string params_hash() const { return apidomain::params_hash(algorithm_, params_, seed_); }

  bool operator==(const MultiLabelModel&) const = default;

  friend void to_json(nlohmann::json& j, const MultiLabelModel& m) {
    j = {{"format_version", kFormatVersion},
         {"algorithm", to_string(m.algorithm_)},
         {"label_names", m.label_names_},
         {"params", params_json(m.algorithm_, m.params_)},
         {"params_hash", m.params_hash()},
         {"seed", m.seed_},
         {"n_features", m.n_features_}};
    if (m.mlknn_) {
      j["mlknn"] = *m.mlknn_;
    } else {
      auto arr = nlohmann::json::array();
      for (const auto& b : m.models_) std::visit([&](const auto& x) { arr.push_back(x); }, b);
      j["models"] = std::move(arr);
    }
  }

  friend void from_json(const nlohmann::json& j, MultiLabelModel& m) {
    if (j.value("format_version", 0) != kFormatVersion)
      throw SchemaError("unsupported model format version " + j.value("format_version", nlohmann::json()).dump());
    m = MultiLabelModel{};
    m.algorithm_ = parse_algorithm(j.at("algorithm").get<std::string>());
    m.label_names_ = j.at("label_names").get<std::vector<std::string>>();
    m.seed_ = j.at("seed").get<std::uint64_t>();
    m.n_features_ = j.at("n_features").get<std::size_t>();
    const auto& p = j.at("params");
    switch (m.algorithm_) {
      case Algorithm::tree: m.params_.tree = p.get<TreeParams>(); break;
      case Algorithm::forest: m.params_.forest = p.get<ForestParams>(); break;
      case Algorithm::logreg: m.params_.logreg = p.get<LogregParams>(); break;
      case Algorithm::mlknn: m.params_.mlknn = p.get<MlknnParams>(); break;
      case Algorithm::dummy: break;
    }
    if (j.at("params_hash").get<std::string>() != m.params_hash())
      throw IntegrityError("model params_hash does not match its parameters");
    if (m.algorithm_ == Algorithm::mlknn) {
      m.mlknn_ = j.at("mlknn").get<Mlknn>();
      return;
    }
    const auto& arr = j.at("models");
    if (arr.size() != m.label_names_.size()) throw SchemaError("model count differs from label count");
    for (const auto& b : arr) {
      switch (m.algorithm_) {
        case Algorithm::tree: m.models_.emplace_back(b.get<DecisionTree>()); break;
        case Algorithm::forest: m.models_.emplace_back(b.get<RandomForest>()); break;
        case Algorithm::logreg: m.models_.emplace_back(b.get<LogregModel>()); break;
        case Algorithm::dummy: m.models_.emplace_back(b.get<UniformDummy>()); break;
        case Algorithm::mlknn: break;
      }
    }
  }

 private:
  void check_width(const FeatureMatrix& X) const {
    if (X.cols() != n_features_)
      throw CompatibilityError("model expects " + std::to_string(n_features_) + " features, input has " +
                               std::to_string(X.cols()));
  }

  Algorithm algorithm_ = Algorithm::forest;
  std::vector<std::string> label_names_;
  LearnerParams params_{};
  std::uint64_t seed_ = 0;
  std::size_t n_features_ = 0;
  std::vector<BaseModel> models_;
  std::optional<Mlknn> mlknn_;
};

}  // namespace apidomain
