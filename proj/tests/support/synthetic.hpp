#pragma once

// Separable multi-label text data: label l is present exactly when both of
// its indicator tokens appear; every document also carries filler words.

#include <string>
#include <vector>

#include "apidomain/common/matrix.hpp"
#include "apidomain/common/rng.hpp"
#include "apidomain/corpus/dataset.hpp"
#include "apidomain/corpus/tfidf.hpp"

namespace synth {

struct TextData {
  std::vector<std::string> docs;
  apidomain::LabelMatrix labels;
  std::vector<std::string> label_names;
};

inline TextData indicator_corpus(std::size_t rows, std::size_t n_labels, std::uint64_t seed,
                                 double p_label = 0.35, std::size_t filler = 8) {
  apidomain::Rng rng(seed);
  TextData d;
  d.labels = apidomain::LabelMatrix(rows, n_labels, 0);
  for (std::size_t l = 0; l < n_labels; ++l) d.label_names.push_back("L" + std::to_string(l));
  for (std::size_t r = 0; r < rows; ++r) {
    std::vector<std::string> toks;
    bool any = false;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (rng.uniform01() < p_label) {
        d.labels(r, l) = 1;
        any = true;
      }
    }
    if (!any) d.labels(r, rng.uniform_index(n_labels)) = 1;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (!d.labels(r, l)) continue;
      toks.push_back("ind" + std::to_string(l) + "a");
      toks.push_back("ind" + std::to_string(l) + "b");
    }
    for (std::size_t f = 0; f < filler; ++f) toks.push_back("noise" + std::to_string(rng.uniform_index(40)));
    rng.shuffle(toks.begin(), toks.end());
    std::string doc;
    for (const auto& t : toks) doc += (doc.empty() ? "" : " ") + t;
    d.docs.push_back(std::move(doc));
  }
  return d;
}

/// Random dense dataset with skewed label frequencies, for oversampling checks.
inline apidomain::MultiLabelDataset imbalanced(apidomain::Rng& rng) {
  const std::size_t rows = 20 + rng.uniform_index(60);
  const std::size_t cols = 2 + rng.uniform_index(5);
  const std::size_t labels = 2 + rng.uniform_index(5);
  apidomain::MultiLabelDataset ds;
  ds.features = apidomain::FeatureMatrix(rows, cols);
  ds.labels = apidomain::LabelMatrix(rows, labels, 0);
  std::vector<double> rate(labels);
  for (auto& p : rate) p = 0.02 + 0.6 * rng.uniform01() * rng.uniform01();
  rate[0] = 0.5 + 0.4 * rng.uniform01();  // one frequent label keeps the imbalance real
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) ds.features(r, c) = rng.uniform01();
    for (std::size_t l = 0; l < labels; ++l) ds.labels(r, l) = rng.uniform01() < rate[l];
    ds.row_ids.push_back("r" + std::to_string(r));
  }
  for (std::size_t l = 0; l < labels; ++l) ds.label_names.push_back("L" + std::to_string(l));
  return ds;
}

}  // namespace synth
