#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/matrix.hpp"

namespace apidomain {

struct LabelCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const LabelCounts&) const = default;
};

using ConfusionCounts = std::vector<LabelCounts>;

inline void check_same_shape(const LabelMatrix& a, const LabelMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ParameterError("label matrices differ in shape: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

inline ConfusionCounts confusion(const LabelMatrix& truth, const LabelMatrix& pred) {
  check_same_shape(truth, pred);
  ConfusionCounts out(truth.cols());
  for (std::size_t r = 0; r < truth.rows(); ++r)
    for (std::size_t c = 0; c < truth.cols(); ++c) {
      const bool t = truth(r, c) != 0, p = pred(r, c) != 0;
      auto& k = out[c];
      if (t && p) ++k.tp;
      else if (!t && p) ++k.fp;
      else if (t && !p) ++k.fn;
      else ++k.tn;
    }
  return out;
}

/// precision/recall/F; a zero denominator yields 0 and sets the flag.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f_undefined = false;
};

inline Prf prf(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf m;
  const auto d = [](std::size_t num, std::size_t den, bool& flag) {
    if (den == 0) {
      flag = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = d(tp, tp + fp, m.precision_undefined);
  m.recall = d(tp, tp + fn, m.recall_undefined);
  m.f = d(2 * tp, 2 * tp + fp + fn, m.f_undefined);
  return m;
}

inline Prf label_metrics(const LabelCounts& c) { return prf(c.tp, c.fp, c.fn); }

/// Metrics of the summed tp/fp/fn over all labels.
inline Prf micro_metrics(const ConfusionCounts& counts) {
  std::size_t tp = 0, fp = 0, fn = 0;
  for (const auto& c : counts) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  return prf(tp, fp, fn);
}

/// Arithmetic mean of per-label metrics (0 where a label's metric is undefined).
inline Prf macro_metrics(const ConfusionCounts& counts) {
  if (counts.empty()) throw ParameterError("macro metrics need at least one label");
  Prf m;
  for (const auto& c : counts) {
    const auto l = label_metrics(c);
    m.precision += l.precision;
    m.recall += l.recall;
    m.f += l.f;
    m.precision_undefined |= l.precision_undefined;
    m.recall_undefined |= l.recall_undefined;
    m.f_undefined |= l.f_undefined;
  }
  const double n = static_cast<double>(counts.size());
  m.precision /= n;
  m.recall /= n;
  m.f /= n;
  return m;
}

inline double hamming_loss(const LabelMatrix& truth, const LabelMatrix& pred) {
  check_same_shape(truth, pred);
  if (truth.data().empty()) throw ParameterError("hamming loss of an empty matrix is undefined");
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.data().size(); ++i) wrong += (truth.data()[i] != 0) != (pred.data()[i] != 0);
  return static_cast<double>(wrong) / static_cast<double>(truth.data().size());
}

/// cell (i, j) = rows carrying both labels; the diagonal is per-label positives.
inline Matrix<std::size_t> cooccurrence(const LabelMatrix& y) {
  if (y.rows() == 0) throw ParameterError("co-occurrence needs at least one row");
  Matrix<std::size_t> out(y.cols(), y.cols(), 0);
  std::vector<std::size_t> on;
  for (std::size_t r = 0; r < y.rows(); ++r) {
    on.clear();
    for (std::size_t c = 0; c < y.cols(); ++c)
      if (y(r, c)) on.push_back(c);
    for (auto i : on)
      for (auto j : on) ++out(i, j);
  }
  return out;
}

}  // namespace apidomain
