#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/matrix.hpp"

namespace apidomain {

struct LogregParams {
  double lr = 0.1;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  bool operator==(const LogregParams&) const = default;
};

inline void to_json(nlohmann::json& j, const LogregParams& p) {
  j = {{"lr", p.lr}, {"epochs", p.epochs}, {"l2", p.l2}};
}
inline void from_json(const nlohmann::json& j, LogregParams& p) {
  p.lr = j.value("lr", 0.1);
  p.epochs = j.value("epochs", std::size_t{500});
  p.l2 = j.value("l2", 1e-4);
}

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct LogregModel {
  std::vector<double> w;
  double b = 0.0;

  double decision(std::span<const double> x) const {
    double z = b;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * x[i];
    return z;
  }
  double score_row(std::span<const double> x) const { return sigmoid(decision(x)); }
  /// p >= 0.5 -> positive
  std::uint8_t predict_row(std::span<const double> x) const { return decision(x) >= 0.0 ? 1 : 0; }

  std::vector<std::uint8_t> predict(const FeatureMatrix& X) const {
    std::vector<std::uint8_t> out(X.rows());
    for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict_row(X.row(r));
    return out;
  }
  bool operator==(const LogregModel&) const = default;
};

inline void to_json(nlohmann::json& j, const LogregModel& m) { j = {{"w", m.w}, {"b", m.b}}; }
inline void from_json(const nlohmann::json& j, LogregModel& m) {
  m.w = j.at("w").get<std::vector<double>>();
  m.b = j.at("b").get<double>();
}

/// Mean log-loss plus (l2/2)·|w|²; the bias is not penalized.
inline double logreg_loss(const FeatureMatrix& X, std::span<const std::uint8_t> y, const LogregModel& m, double l2) {
  double loss = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const double z = m.decision(X.row(r));
    loss += softplus(z) - (y[r] ? z : 0.0);
  }
  loss /= static_cast<double>(X.rows());
  double sq = 0.0;
  for (double v : m.w) sq += v * v;
  return loss + 0.5 * l2 * sq;
}

/// Analytic gradient of logreg_loss; returns d/dw in `gw`, d/db in `gb`.
inline void logreg_gradient(const FeatureMatrix& X, std::span<const std::uint8_t> y, const LogregModel& m, double l2,
                            std::vector<double>& gw, double& gb) {
  const std::size_t d = X.cols();
  gw.assign(d, 0.0);
  gb = 0.0;
  for (std::size_t r = 0; r < X.rows(); ++r) {
    const auto x = X.row(r);
    const double e = sigmoid(m.decision(x)) - (y[r] ? 1.0 : 0.0);
    for (std::size_t i = 0; i < d; ++i) gw[i] += e * x[i];
    gb += e;
  }
  const double inv = 1.0 / static_cast<double>(X.rows());
  for (std::size_t i = 0; i < d; ++i) gw[i] = gw[i] * inv + l2 * m.w[i];
  gb *= inv;
}

/// Full-batch gradient descent from zero weights.
inline LogregModel train_logreg(const FeatureMatrix& X, std::span<const std::uint8_t> y, const LogregParams& p) {
  if (X.rows() != y.size()) throw ParameterError("logreg: feature rows and label length differ");
  if (X.rows() == 0) throw DatasetTooSmallError("logreg: no training rows");
  if (!(p.lr > 0.0) || !(p.l2 >= 0.0)) throw ParameterError("logreg: lr must be > 0 and l2 >= 0");
  LogregModel m;
  m.w.assign(X.cols(), 0.0);
  std::vector<double> gw;
  double gb = 0.0;
  for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
    logreg_gradient(X, y, m, p.l2, gw, gb);
    for (std::size_t i = 0; i < m.w.size(); ++i) m.w[i] -= p.lr * gw[i];
    m.b -= p.lr * gb;
    const double loss = logreg_loss(X, y, m, p.l2);
    if (!std::isfinite(loss))
      throw DivergenceError("logistic regression diverged at epoch " + std::to_string(epoch + 1) +
                            " (non-finite loss); try a smaller learning rate than " + std::to_string(p.lr));
  }
  return m;
}

}  // namespace apidomain
