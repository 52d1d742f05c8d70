#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/matrix.hpp"
#include "apidomain/common/rng.hpp"

namespace apidomain {

/// Shannon entropy in bits of a binary class distribution.
inline double entropy(std::size_t neg, std::size_t pos) {
  const std::size_t n = neg + pos;
  if (n == 0) throw ParameterError("entropy of an empty node is undefined");
  double h = 0.0;
  for (std::size_t c : {neg, pos}) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    h -= p * std::log2(p);
  }
  return h;
}

struct TreeParams {
  int max_depth = 50;
  std::size_t min_samples_split = 3;
  std::size_t min_samples_leaf = 1;
  // 0 = every feature is a candidate at every split
  std::size_t features_per_split = 0;

  bool operator==(const TreeParams&) const = default;
};

inline void to_json(nlohmann::json& j, const TreeParams& p) {
  j = {{"criterion", "entropy"},
       {"max_depth", p.max_depth},
       {"min_samples_split", p.min_samples_split},
       {"min_samples_leaf", p.min_samples_leaf},
       {"features_per_split", p.features_per_split}};
}
inline void from_json(const nlohmann::json& j, TreeParams& p) {
  p.max_depth = j.value("max_depth", 50);
  p.min_samples_split = j.value("min_samples_split", std::size_t{3});
  p.min_samples_leaf = j.value("min_samples_leaf", std::size_t{1});
  p.features_per_split = j.value("features_per_split", std::size_t{0});
}

struct TreeNode {
  // internal: feature >= 0, children set; leaf: feature = -1
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::uint32_t neg = 0;
  std::uint32_t pos = 0;
  double gain = 0.0;

  bool leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct SplitCandidate {
  std::int32_t feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

/// Binary classification tree grown greedily on information gain; samples
/// go left when x[feature] <= threshold.
class DecisionTree {
 public:
  DecisionTree() = default;

  /// `sample` lists training row indices (repeats allowed, as in a
  /// bootstrap). `rng` is only consulted when features_per_split < d.
  static DecisionTree train(const FeatureMatrix& X, std::span<const std::uint8_t> y,
                            std::vector<std::size_t> sample, const TreeParams& p, Rng* rng = nullptr) {
    if (X.rows() != y.size()) throw ParameterError("tree: feature rows and label length differ");
    if (p.min_samples_leaf < 1) throw ParameterError("tree: min_samples_leaf must be >= 1");
    if (p.max_depth < 0) throw ParameterError("tree: max_depth must be >= 0");
    DecisionTree t;
    t.n_features_ = X.cols();
    if (sample.empty()) {
      t.nodes_.push_back(TreeNode{});
      return t;
    }
    Builder b{X, y, p, rng, t.nodes_, {}, {}};
    b.grow(sample, 0);
    return t;
  }

  static DecisionTree train(const FeatureMatrix& X, std::span<const std::uint8_t> y, const TreeParams& p,
                            Rng* rng = nullptr) {
    std::vector<std::size_t> all(X.rows());
    std::iota(all.begin(), all.end(), 0);
    return train(X, y, std::move(all), p, rng);
  }

  const TreeNode& leaf_for(std::span<const double> x) const {
    std::size_t i = 0;
    while (!nodes_[i].leaf()) {
      const auto& n = nodes_[i];
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes_[i];
  }

  /// Leaf majority; an evenly split (or empty) leaf predicts positive.
  std::uint8_t predict_row(std::span<const double> x) const {
    const auto& l = leaf_for(x);
    return l.pos >= l.neg ? 1 : 0;
  }

  double score_row(std::span<const double> x) const {
    const auto& l = leaf_for(x);
    const auto n = l.neg + l.pos;
    return n == 0 ? 0.5 : static_cast<double>(l.pos) / static_cast<double>(n);
  }

  std::vector<std::uint8_t> predict(const FeatureMatrix& X) const {
    std::vector<std::uint8_t> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r));
    return out;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t n_features() const { return n_features_; }

  int depth() const {
    if (nodes_.empty()) return 0;
    int best = 0;
    std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes_[i].leaf()) {
        stack.emplace_back(static_cast<std::size_t>(nodes_[i].left), d + 1);
        stack.emplace_back(static_cast<std::size_t>(nodes_[i].right), d + 1);
      }
    }
    return best;
  }

  bool operator==(const DecisionTree&) const = default;

  friend void to_json(nlohmann::json& j, const DecisionTree& t) {
    // columnar layout keeps model files compact
    nlohmann::json f = nlohmann::json::array(), th = nlohmann::json::array(), l = nlohmann::json::array(),
                   r = nlohmann::json::array(), ng = nlohmann::json::array(), ps = nlohmann::json::array(),
                   g = nlohmann::json::array();
    for (const auto& n : t.nodes_) {
      f.push_back(n.feature);
      th.push_back(n.threshold);
      l.push_back(n.left);
      r.push_back(n.right);
      ng.push_back(n.neg);
      ps.push_back(n.pos);
      g.push_back(n.gain);
    }
    j = {{"n_features", t.n_features_}, {"feature", f}, {"threshold", th}, {"left", l},
         {"right", r},                  {"neg", ng},    {"pos", ps},       {"gain", g}};
  }
  friend void from_json(const nlohmann::json& j, DecisionTree& t) {
    t = DecisionTree{};
    t.n_features_ = j.at("n_features").get<std::size_t>();
    const auto& f = j.at("feature");
    const std::size_t n = f.size();
    for (const char* key : {"threshold", "left", "right", "neg", "pos", "gain"})
      if (j.at(key).size() != n) throw SchemaError("tree: node arrays differ in length");
    t.nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      auto& node = t.nodes_[i];
      node.feature = f[i].get<std::int32_t>();
      node.threshold = j["threshold"][i].get<double>();
      node.left = j["left"][i].get<std::int32_t>();
      node.right = j["right"][i].get<std::int32_t>();
      node.neg = j["neg"][i].get<std::uint32_t>();
      node.pos = j["pos"][i].get<std::uint32_t>();
      node.gain = j["gain"][i].get<double>();
      if (!node.leaf() && (node.left <= static_cast<std::int32_t>(i) || node.right <= static_cast<std::int32_t>(i) ||
                           node.left >= static_cast<std::int32_t>(n) || node.right >= static_cast<std::int32_t>(n) ||
                           node.feature >= static_cast<std::int32_t>(t.n_features_)))
        throw SchemaError("tree: corrupt node " + std::to_string(i));
    }
    if (t.nodes_.empty()) throw SchemaError("tree: no nodes");
  }

 private:
  struct Builder {
    const FeatureMatrix& X;
    std::span<const std::uint8_t> y;
    const TreeParams& p;
    Rng* rng;
    std::vector<TreeNode>& nodes;
    std::vector<std::pair<double, std::uint8_t>> buf;
    std::vector<std::size_t> feats;

    std::vector<std::size_t> candidate_features() {
      const std::size_t d = X.cols();
      const std::size_t m = p.features_per_split;
      if (m == 0 || m >= d || rng == nullptr) {
        feats.resize(d);
        std::iota(feats.begin(), feats.end(), 0);
        return feats;
      }
      feats.resize(d);
      std::iota(feats.begin(), feats.end(), 0);
      for (std::size_t i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::size_t>(rng->uniform_index(d - i));
        std::swap(feats[i], feats[j]);
      }
      std::vector<std::size_t> chosen(feats.begin(), feats.begin() + static_cast<std::ptrdiff_t>(m));
      std::sort(chosen.begin(), chosen.end());
      return chosen;
    }

    SplitCandidate best_split(const std::vector<std::size_t>& rows, std::size_t neg, std::size_t pos) {
      SplitCandidate best;
      const double parent = entropy(neg, pos);
      const double n = static_cast<double>(rows.size());
      for (std::size_t f : candidate_features()) {
        buf.clear();
        for (auto r : rows) buf.emplace_back(X(r, f), y[r]);
        std::sort(buf.begin(), buf.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        if (buf.front().first == buf.back().first) continue;
        std::size_t lneg = 0, lpos = 0;
        for (std::size_t i = 0; i + 1 < buf.size(); ++i) {
          (buf[i].second ? lpos : lneg) += 1;
          if (buf[i].first == buf[i + 1].first) continue;
          const std::size_t nl = i + 1, nr = buf.size() - nl;
          if (nl < p.min_samples_leaf || nr < p.min_samples_leaf) continue;
          const double child = (static_cast<double>(nl) * entropy(lneg, lpos) +
                                static_cast<double>(nr) * entropy(neg - lneg, pos - lpos)) / n;
          const double gain = parent - child;
          if (gain > best.gain + 1e-12) {
            double thr = buf[i].first + (buf[i + 1].first - buf[i].first) / 2.0;
            if (!(thr < buf[i + 1].first)) thr = buf[i].first;
            best = {static_cast<std::int32_t>(f), thr, gain};
          }
        }
      }
      return best;
    }

    std::int32_t grow(const std::vector<std::size_t>& rows, int depth) {
      const auto id = static_cast<std::int32_t>(nodes.size());
      nodes.push_back(TreeNode{});
      std::size_t pos = 0;
      for (auto r : rows) pos += y[r] ? 1 : 0;
      const std::size_t neg = rows.size() - pos;
      nodes[id].neg = static_cast<std::uint32_t>(neg);
      nodes[id].pos = static_cast<std::uint32_t>(pos);
      if (depth >= p.max_depth || rows.size() < p.min_samples_split || pos == 0 || neg == 0) return id;
      const auto s = best_split(rows, neg, pos);
      if (s.feature < 0 || !(s.gain > 0.0)) return id;

      std::vector<std::size_t> lrows, rrows;
      for (auto r : rows) (X(r, static_cast<std::size_t>(s.feature)) <= s.threshold ? lrows : rrows).push_back(r);
      nodes[id].feature = s.feature;
      nodes[id].threshold = s.threshold;
      nodes[id].gain = s.gain;
      const auto l = grow(lrows, depth + 1);
      const auto r = grow(rrows, depth + 1);
      nodes[id].left = l;
      nodes[id].right = r;
      return id;
    }
  };

  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
};

}  // namespace apidomain
