#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/parallel.hpp"
#include "apidomain/common/rng.hpp"
#include "apidomain/learn/tree.hpp"

namespace apidomain {

struct ForestParams {
  TreeParams tree{};
  std::size_t n_estimators = 50;
  bool bootstrap = true;
  // 0 = ceil(sqrt(d)); otherwise a fixed count (>= d means every feature)
  std::size_t max_features = 0;

  std::size_t features_for(std::size_t d) const {
    if (max_features != 0) return std::min(max_features, d);
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d))));
  }
  bool operator==(const ForestParams&) const = default;
};

inline void to_json(nlohmann::json& j, const ForestParams& p) {
  j = {{"tree", p.tree}, {"n_estimators", p.n_estimators}, {"bootstrap", p.bootstrap}};
  if (p.max_features == 0) j["max_features"] = "sqrt";
  else j["max_features"] = p.max_features;
}
inline void from_json(const nlohmann::json& j, ForestParams& p) {
  p.tree = j.value("tree", TreeParams{});
  p.n_estimators = j.value("n_estimators", std::size_t{50});
  p.bootstrap = j.value("bootstrap", true);
  const auto mf = j.value("max_features", nlohmann::json("sqrt"));
  p.max_features = mf.is_string() ? 0 : mf.get<std::size_t>();
}

/// Bagged entropy trees with per-split feature subsampling. Tree t draws
/// from its own stream derived from (seed, t), so training in parallel is
/// deterministic.
class RandomForest {
 public:
  static RandomForest train(const FeatureMatrix& X, std::span<const std::uint8_t> y, const ForestParams& p,
                            std::uint64_t seed, unsigned jobs = 1) {
    if (p.n_estimators == 0) throw ParameterError("forest: n_estimators must be >= 1");
    RandomForest f;
    f.trees_.resize(p.n_estimators);
    TreeParams tp = p.tree;
    tp.features_per_split = p.features_for(X.cols());
    const bool subsample = tp.features_per_split < X.cols();
    if (!subsample) tp.features_per_split = 0;
    parallel_for(p.n_estimators, jobs, [&](std::size_t t) {
      Rng rng(derive_seed(seed, t));
      std::vector<std::size_t> sample(X.rows());
      if (p.bootstrap) {
        for (auto& s : sample) s = static_cast<std::size_t>(rng.uniform_index(X.rows()));
      } else {
        std::iota(sample.begin(), sample.end(), 0);
      }
      f.trees_[t] = DecisionTree::train(X, y, std::move(sample), tp, subsample ? &rng : nullptr);
    });
    return f;
  }

  /// Fraction of trees voting positive.
  double score_row(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees_) votes += t.predict_row(x);
    return static_cast<double>(votes) / static_cast<double>(trees_.size());
  }

  /// Majority vote; a tied vote predicts positive.
  std::uint8_t predict_row(std::span<const double> x) const {
    std::size_t votes = 0;
    for (const auto& t : trees_) votes += t.predict_row(x);
    return 2 * votes >= trees_.size() ? 1 : 0;
  }

  std::vector<std::uint8_t> predict(const FeatureMatrix& X) const {
    std::vector<std::uint8_t> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r));
    return out;
  }

  const std::vector<DecisionTree>& trees() const { return trees_; }
  bool operator==(const RandomForest&) const = default;

  friend void to_json(nlohmann::json& j, const RandomForest& f) { j = {{"trees", f.trees_}}; }
  friend void from_json(const nlohmann::json& j, RandomForest& f) {
    f.trees_ = j.at("trees").get<std::vector<DecisionTree>>();
    if (f.trees_.empty()) throw SchemaError("forest: no trees");
  }

 private:
  std::vector<DecisionTree> trees_;
};

}  // namespace apidomain
