#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/matrix.hpp"
#include "apidomain/common/parallel.hpp"
#include "apidomain/common/text.hpp"

namespace apidomain {

struct NgramRange {
  int lo = 1;
  int hi = 1;

  void validate() const {
    if (lo < 1 || hi > 4 || lo > hi)
      throw ParameterError("ngram range (" + std::to_string(lo) + "," + std::to_string(hi) +
                           ") must satisfy 1 <= lo <= hi <= 4");
  }
  bool operator==(const NgramRange&) const = default;
};

inline std::string to_string(NgramRange r) { return std::to_string(r.lo) + "-" + std::to_string(r.hi); }

/// Accepts "2", "1-3" or "1,3".
inline NgramRange parse_ngram_range(std::string_view s) {
  const auto t = std::string(text::trim(s));
  NgramRange r;
  try {
    const auto sep = t.find_first_of("-,:");
    if (sep == std::string::npos) {
      r.lo = r.hi = std::stoi(t);
    } else {
      r.lo = std::stoi(t.substr(0, sep));
      r.hi = std::stoi(t.substr(sep + 1));
    }
  } catch (const std::exception&) {
    throw ConfigError("bad ngram range '" + t + "'");
  }
  r.validate();
  return r;
}

/// Space-joined n-grams of a whitespace-tokenized document, lo..hi.
inline std::vector<std::string> ngrams(const std::vector<std::string>& toks, NgramRange r) {
  std::vector<std::string> out;
  for (int n = r.lo; n <= r.hi; ++n) {
    if (toks.size() < static_cast<std::size_t>(n)) break;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
      std::string g = toks[i];
      for (int k = 1; k < n; ++k) {
        g.push_back(' ');
        g += toks[i + k];
      }
      out.push_back(std::move(g));
    }
  }
  return out;
}

/// Raw-count tf, smoothed idf ln((1+n)/(1+df)) + 1, rows L2-normalized.
class TfidfModel {
 public:
  TfidfModel() = default;

  static TfidfModel fit(const std::vector<std::string>& docs, NgramRange range,
                        std::set<std::string> sources = {}) {
    range.validate();
    if (docs.empty()) throw DataError("cannot fit TF-IDF on an empty corpus");
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
      std::set<std::string> uniq;
      for (auto& g : ngrams(text::split_whitespace(d), range)) uniq.insert(std::move(g));
      for (const auto& g : uniq) ++df[g];
    }
    TfidfModel m;
    m.range_ = range;
    m.n_docs_ = docs.size();
    m.sources_ = std::move(sources);
    m.terms_.reserve(df.size());
    m.idf_.reserve(df.size());
    const double n = static_cast<double>(docs.size());
    for (const auto& [term, count] : df) {
      m.index_.emplace(term, m.terms_.size());
      m.terms_.push_back(term);
      m.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    m.fitted_ = true;
    return m;
  }

  bool fitted() const { return fitted_; }
  std::size_t vocabulary_size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  NgramRange ngram_range() const { return range_; }
  std::size_t fitted_on() const { return n_docs_; }
  /// Projects (or other corpus sources) whose text the vocabulary came from.
  const std::set<std::string>& sources() const { return sources_; }

  std::optional<std::size_t> column(const std::string& term) const {
    auto it = index_.find(term);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<double> transform_one(const std::string& doc) const {
    require_fitted();
    std::vector<double> row(terms_.size(), 0.0);
    for (const auto& g : ngrams(text::split_whitespace(doc), range_)) {
      auto it = index_.find(g);
      if (it != index_.end()) row[it->second] += 1.0;
    }
    double norm = 0.0;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] == 0.0) continue;
      row[c] *= idf_[c];
      norm += row[c] * row[c];
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& v : row) v /= norm;
    }
    return row;
  }

  FeatureMatrix transform(const std::vector<std::string>& docs, unsigned jobs = 0) const {
    require_fitted();
    FeatureMatrix out(docs.size(), terms_.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) {
      const auto row = transform_one(docs[i]);
      std::copy(row.begin(), row.end(), out.row(i).begin());
    });
    return out;
  }

  friend void to_json(nlohmann::json& j, const TfidfModel& m) {
    j = {{"format_version", 1},
         {"ngram_range", {m.range_.lo, m.range_.hi}},
         {"fitted_on", m.n_docs_},
         {"sources", m.sources_},
         {"terms", m.terms_},
         {"idf", m.idf_}};
  }
  friend void from_json(const nlohmann::json& j, TfidfModel& m) {
    if (j.value("format_version", 0) != 1) throw SchemaError("unsupported TF-IDF model format");
    m = TfidfModel{};
    m.range_ = {j.at("ngram_range").at(0).get<int>(), j.at("ngram_range").at(1).get<int>()};
    m.range_.validate();
    m.n_docs_ = j.at("fitted_on").get<std::size_t>();
    m.sources_ = j.value("sources", std::set<std::string>{});
    m.terms_ = j.at("terms").get<std::vector<std::string>>();
    m.idf_ = j.at("idf").get<std::vector<double>>();
    if (m.terms_.size() != m.idf_.size()) throw SchemaError("TF-IDF terms/idf length mismatch");
    for (std::size_t i = 0; i < m.terms_.size(); ++i) {
      if (!(m.idf_[i] > 0.0)) throw SchemaError("TF-IDF idf must be positive");
      m.index_.emplace(m.terms_[i], i);
    }
    m.fitted_ = true;
  }

 private:
  void require_fitted() const {
    if (!fitted_) throw StateError("TF-IDF model used before fit");
  }

  bool fitted_ = false;
  NgramRange range_;
  std::size_t n_docs_ = 0;
  std::set<std::string> sources_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::size_t> index_;
};

inline TfidfModel fit_tfidf(const std::vector<std::string>& docs, NgramRange range) {
  return TfidfModel::fit(docs, range);
}

}  // namespace apidomain
