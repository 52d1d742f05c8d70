#pragma once

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "apidomain/common/error.hpp"
#include "apidomain/common/rng.hpp"
#include "apidomain/corpus/dataset.hpp"

namespace apidomain {

/// IRLbl per label: max positives over this label's positives. Labels with
/// no positives get +inf and are excluded from MeanIR.
inline std::vector<double> irlbl(const LabelMatrix& y) {
  const auto pos = label_positives(y);
  const auto mx = pos.empty() ? 0 : *std::max_element(pos.begin(), pos.end());
  std::vector<double> out(pos.size());
  for (std::size_t c = 0; c < pos.size(); ++c)
    out[c] = pos[c] == 0 ? std::numeric_limits<double>::infinity()
                         : static_cast<double>(mx) / static_cast<double>(pos[c]);
  return out;
}

inline double mean_ir(const LabelMatrix& y) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double v : irlbl(y))
    if (std::isfinite(v)) {
      sum += v;
      ++n;
    }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

struct MlsmoteReport {
  std::vector<std::string> minority_labels;
  std::vector<std::string> skipped_labels;  // fewer than two positives
  std::size_t synthesized = 0;
  std::size_t rejected = 0;  // candidates that would have raised MeanIR
};

namespace detail {
inline double mean_ir_of(const std::vector<std::size_t>& pos) {
  const auto mx = pos.empty() ? 0 : *std::max_element(pos.begin(), pos.end());
  double sum = 0.0;
  std::size_t n = 0;
  for (auto p : pos)
    if (p > 0) {
      sum += static_cast<double>(mx) / static_cast<double>(p);
      ++n;
    }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}
}  // namespace detail

/// Multi-label SMOTE. For every minority label (IRLbl > MeanIR) and every
/// sample in its positive bag: pick one of the sample's k nearest bag
/// neighbours at random, interpolate features, and set each label held by
/// more than half of {sample} ∪ neighbours. Synthetic rows are appended
/// after the originals and flagged.
///
/// A candidate whose label row would raise the running MeanIR is dropped:
/// the ranking vote can copy the most frequent label into every synthetic
/// row, and with a label too rare to oversample (one positive) that inflates
/// its ratio more than the augmentation helps the others.
inline MultiLabelDataset mlsmote(const MultiLabelDataset& train, std::size_t k, std::uint64_t seed,
                                 MlsmoteReport* report = nullptr) {
  train.validate();
  if (k == 0) throw ParameterError("MLSMOTE needs k >= 1");
  if (k >= train.rows())
    throw ParameterError("MLSMOTE k (" + std::to_string(k) + ") must be smaller than the training rows (" +
                         std::to_string(train.rows()) + ")");
  MlsmoteReport local;
  MlsmoteReport& rep = report ? *report : local;

  const auto& X = train.features;
  const auto& Y = train.labels;
  const auto ir = irlbl(Y);
  const double mir = mean_ir(Y);

  MultiLabelDataset out = train;
  if (out.synthetic.empty()) out.synthetic.assign(out.rows(), 0);
  Rng rng(seed);
  auto positives = label_positives(Y);
  double running = detail::mean_ir_of(positives);

  std::vector<double> feat(X.cols());
  std::vector<std::uint8_t> lab(Y.cols());
  for (std::size_t l = 0; l < Y.cols(); ++l) {
    if (!std::isfinite(ir[l]) || !(ir[l] > mir)) continue;
    rep.minority_labels.push_back(train.label_names[l]);
    std::vector<std::size_t> bag;
    for (std::size_t r = 0; r < Y.rows(); ++r)
      if (Y(r, l)) bag.push_back(r);
    if (bag.size() < 2) {
      spdlog::warn("MLSMOTE: label '{}' has {} positive sample(s); skipped", train.label_names[l], bag.size());
      rep.skipped_labels.push_back(train.label_names[l]);
      continue;
    }
    const std::size_t kk = std::min(k, bag.size() - 1);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t seed_row : bag) {
      dist.clear();
      for (std::size_t other : bag)
        if (other != seed_row) dist.emplace_back(squared_distance(X.row(seed_row), X.row(other)), other);
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
      const std::size_t ref = dist[rng.uniform_index(kk)].second;
      const double u = rng.uniform01();
      for (std::size_t c = 0; c < X.cols(); ++c) feat[c] = X(seed_row, c) + u * (X(ref, c) - X(seed_row, c));

      // ranking: majority over the seed and its kk neighbours
      for (std::size_t c = 0; c < Y.cols(); ++c) {
        std::size_t votes = Y(seed_row, c) ? 1 : 0;
        for (std::size_t i = 0; i < kk; ++i) votes += Y(dist[i].second, c) ? 1 : 0;
        lab[c] = 2 * votes > kk + 1;
      }
      auto next = positives;
      for (std::size_t c = 0; c < Y.cols(); ++c) next[c] += lab[c];
      const double next_ir = detail::mean_ir_of(next);
      if (next_ir > running) {
        ++rep.rejected;
        continue;
      }
      positives = std::move(next);
      running = next_ir;
      out.features.append_row(feat);
      out.labels.append_row(lab);
      out.row_ids.push_back("synthetic:" + train.row_ids[seed_row] + ":" + train.label_names[l] + ":" +
                            std::to_string(rep.synthesized));
      out.synthetic.push_back(1);
      ++rep.synthesized;
    }
  }
  return out;
}

}  // namespace apidomain
