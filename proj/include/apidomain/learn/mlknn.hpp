#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/matrix.hpp"
#include "apidomain/common/parallel.hpp"

namespace apidomain {

struct MlknnParams {
  std::size_t k = 10;
  double s = 1.0;
  bool operator==(const MlknnParams&) const = default;
};

inline void to_json(nlohmann::json& j, const MlknnParams& p) { j = {{"k", p.k}, {"s", p.s}}; }
inline void from_json(const nlohmann::json& j, MlknnParams& p) {
  p.k = j.value("k", std::size_t{10});
  p.s = j.value("s", 1.0);
}

/// Indices of the k nearest rows of `ref` to `x` (Euclidean, ties by index),
/// optionally excluding one row.
inline std::vector<std::size_t> nearest_rows(const FeatureMatrix& ref, std::span<const double> x, std::size_t k,
                                             std::size_t exclude = static_cast<std::size_t>(-1)) {
  std::vector<std::pair<double, std::size_t>> d;
  d.reserve(ref.rows());
  for (std::size_t r = 0; r < ref.rows(); ++r) {
    if (r == exclude) continue;
    double s = 0.0;
    const auto row = ref.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      const double t = row[c] - x[c];
      s += t * t;
    }
    d.emplace_back(s, r);
  }
  k = std::min(k, d.size());
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
  return out;
}

/// ML-kNN (Zhang & Zhou): per label, a smoothed prior and the likelihood of
/// seeing c of k neighbours carrying the label under each hypothesis.
class Mlknn {
 public:
  static Mlknn train(const FeatureMatrix& X, const LabelMatrix& Y, const MlknnParams& p, unsigned jobs = 1) {
    const std::size_t n = X.rows();
    if (Y.rows() != n) throw ParameterError("mlknn: feature and label rows differ");
    if (p.k == 0 || p.k >= n)
      throw ParameterError("mlknn: k (" + std::to_string(p.k) + ") must satisfy 1 <= k < n (" + std::to_string(n) + ")");
    if (!(p.s > 0.0)) throw ParameterError("mlknn: smoothing s must be > 0");
    Mlknn m;
    m.params_ = p;
    m.X_ = X;
    m.Y_ = Y;
    const std::size_t L = Y.cols(), k = p.k;

    std::vector<std::vector<std::size_t>> nbrs(n);
    parallel_for(n, jobs, [&](std::size_t i) { nbrs[i] = nearest_rows(X, X.row(i), k, i); });

    m.prior1_.assign(L, 0.0);
    m.cond1_.assign(L, std::vector<double>(k + 1, 0.0));
    m.cond0_.assign(L, std::vector<double>(k + 1, 0.0));
    for (std::size_t l = 0; l < L; ++l) {
      std::vector<double> c1(k + 1, 0.0), c0(k + 1, 0.0);
      double positives = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t c = 0;
        for (auto j : nbrs[i]) c += Y(j, l) ? 1 : 0;
        if (Y(i, l)) {
          c1[c] += 1;
          positives += 1;
        } else {
          c0[c] += 1;
        }
      }
      m.prior1_[l] = (p.s + positives) / (2.0 * p.s + static_cast<double>(n));
      const double t1 = positives, t0 = static_cast<double>(n) - positives;
      const double kk = static_cast<double>(k + 1);
      for (std::size_t c = 0; c <= k; ++c) {
        m.cond1_[l][c] = (p.s + c1[c]) / (p.s * kk + t1);
        m.cond0_[l][c] = (p.s + c0[c]) / (p.s * kk + t0);
      }
    }
    return m;
  }

  std::size_t labels() const { return prior1_.size(); }
  double prior(std::size_t l) const { return prior1_[l]; }
  const std::vector<double>& likelihood(std::size_t l, bool h1) const { return h1 ? cond1_[l] : cond0_[l]; }
  const MlknnParams& params() const { return params_; }

  /// Posterior P(H1 | c) per label, and the MAP decision (ties -> positive).
  void predict_row(std::span<const double> x, std::span<std::uint8_t> out, std::span<double> score) const {
    const auto nb = nearest_rows(X_, x, params_.k);
    for (std::size_t l = 0; l < labels(); ++l) {
      std::size_t c = 0;
      for (auto j : nb) c += Y_(j, l) ? 1 : 0;
      const double a = prior1_[l] * cond1_[l][c];
      const double b = (1.0 - prior1_[l]) * cond0_[l][c];
      out[l] = a >= b ? 1 : 0;
      if (!score.empty()) score[l] = a / (a + b);
    }
  }

  LabelMatrix predict(const FeatureMatrix& X, unsigned jobs = 1) const {
    LabelMatrix out(X.rows(), labels());
    parallel_for(X.rows(), jobs, [&](std::size_t r) { predict_row(X.row(r), out.row(r), {}); });
    return out;
  }

  FeatureMatrix scores(const FeatureMatrix& X, unsigned jobs = 1) const {
    FeatureMatrix out(X.rows(), labels());
    parallel_for(X.rows(), jobs, [&](std::size_t r) {
      std::vector<std::uint8_t> tmp(labels());
      predict_row(X.row(r), tmp, out.row(r));
    });
    return out;
  }

  bool operator==(const Mlknn&) const = default;

  friend void to_json(nlohmann::json& j, const Mlknn& m) {
    j = {{"params", m.params_},
         {"rows", m.X_.rows()},
         {"cols", m.X_.cols()},
         {"features", m.X_.data()},
         {"labels", m.Y_.data()},
         {"n_labels", m.Y_.cols()},
         {"prior1", m.prior1_},
         {"cond1", m.cond1_},
         {"cond0", m.cond0_}};
  }
  friend void from_json(const nlohmann::json& j, Mlknn& m) {
    m.params_ = j.at("params").get<MlknnParams>();
    const auto rows = j.at("rows").get<std::size_t>();
    m.X_ = FeatureMatrix(rows, j.at("cols").get<std::size_t>(), j.at("features").get<std::vector<double>>());
    m.Y_ = LabelMatrix(rows, j.at("n_labels").get<std::size_t>(), j.at("labels").get<std::vector<std::uint8_t>>());
    m.prior1_ = j.at("prior1").get<std::vector<double>>();
    m.cond1_ = j.at("cond1").get<std::vector<std::vector<double>>>();
    m.cond0_ = j.at("cond0").get<std::vector<std::vector<double>>>();
    if (m.prior1_.size() != m.Y_.cols() || m.cond1_.size() != m.Y_.cols() || m.cond0_.size() != m.Y_.cols())
      throw SchemaError("mlknn: table sizes disagree with label count");
  }

 private:
  MlknnParams params_;
  FeatureMatrix X_;
  LabelMatrix Y_;
  std::vector<double> prior1_;
  std::vector<std::vector<double>> cond1_, cond0_;
};

}  // namespace apidomain
