#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/taxonomy/domain.hpp"

namespace apidomain {

/// Pretrained word vectors keyed by lowercase token.
class WordVectorStore {
 public:
  WordVectorStore() = default;
  explicit WordVectorStore(std::size_t dimension) : dimension_(dimension) {}

  [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

  void add(std::string_view token, std::vector<double> v) {
    if (dimension_ == 0) dimension_ = v.size();
    if (v.size() != dimension_)
      throw StoreCorruptionError("vector for '" + std::string(token) + "' has " +
                                 std::to_string(v.size()) + " components, expected " +
                                 std::to_string(dimension_));
    entries_.try_emplace(text::to_lower_ascii(token), std::move(v));
  }

  [[nodiscard]] const std::vector<double>* find(std::string_view token) const {
    auto it = entries_.find(text::to_lower_ascii(token));
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Reads `token v1 ... vd` lines. An optional word2vec-style
  /// "<count> <dimension>" header line is skipped.
  static WordVectorStore parse(std::string_view content) {
    WordVectorStore store;
    std::size_t lineno = 0;
    for (const auto& raw : text::split(content, '\n')) {
      ++lineno;
      const auto fields = text::split_whitespace(raw);
      if (fields.empty()) continue;
      if (lineno == 1 && fields.size() == 2 &&
          std::all_of(fields[0].begin(), fields[0].end(), ::isdigit) &&
          std::all_of(fields[1].begin(), fields[1].end(), ::isdigit))
        continue;
      if (fields.size() < 2)
        throw StoreCorruptionError("vector line " + std::to_string(lineno) + " has no components");
      std::vector<double> v;
      v.reserve(fields.size() - 1);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        try {
          v.push_back(std::stod(fields[i]));
        } catch (const std::exception&) {
          throw StoreCorruptionError("vector line " + std::to_string(lineno) +
                                     ": bad component '" + fields[i] + "'");
        }
      }
      try {
        store.add(fields[0], std::move(v));
      } catch (const StoreCorruptionError& e) {
        throw StoreCorruptionError(std::string(e.what()) + " (line " + std::to_string(lineno) + ")");
      }
    }
    return store;
  }

  static WordVectorStore load(const std::filesystem::path& path) {
    return parse(text::read_file(path));
  }

 private:
  std::size_t dimension_ = 0;
  std::unordered_map<std::string, std::vector<double>> entries_;
};

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

/// Words of a domain's display name, split on whitespace, '-' and '/'.
inline std::vector<std::string> domain_words(ApiDomain d) {
  std::string s(info(d).display_name);
  std::replace(s.begin(), s.end(), '-', ' ');
  std::replace(s.begin(), s.end(), '/', ' ');
  auto words = text::split_whitespace(s);
  for (auto& w : words) w = text::to_lower_ascii(w);
  return words;
}

/// Mean vector of a domain's display-name words present in the store.
inline std::optional<std::vector<double>> domain_vector(ApiDomain d, const WordVectorStore& store) {
  std::vector<double> sum(store.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& w : domain_words(d)) {
    if (const auto* v = store.find(w)) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
      ++found;
    }
  }
  if (found == 0) return std::nullopt;
  for (auto& x : sum) x /= static_cast<double>(found);
  return sum;
}

struct Suggestion {
  ApiDomain domain;
  double score;

  friend bool operator==(const Suggestion&, const Suggestion&) = default;
};

struct SuggestionList {
  std::vector<Suggestion> ranked;  // descending score, ties by enumeration order
  bool out_of_vocabulary = false;
};

/// Domain embeddings computed once per store.
class DomainEmbeddings {
 public:
  explicit DomainEmbeddings(const WordVectorStore& store) : store_(&store) {
    for (const auto& d : kDomains) vectors_[index_of(d.domain)] = domain_vector(d.domain, store);
  }

  [[nodiscard]] SuggestionList suggest(std::string_view token, std::size_t k) const {
    if (k == 0 || k > kDomainCount)
      throw ParameterError("suggestion count must be in 1..31, got " + std::to_string(k));
    SuggestionList out;
    const auto* v = store_->find(token);
    if (!v) {
      out.out_of_vocabulary = true;
      return out;
    }
    for (const auto& d : kDomains)
      if (const auto& dv = vectors_[index_of(d.domain)]) out.ranked.push_back({d.domain, cosine(*v, *dv)});
    std::stable_sort(out.ranked.begin(), out.ranked.end(),
                     [](const Suggestion& a, const Suggestion& b) { return a.score > b.score; });
    if (out.ranked.size() > k) out.ranked.resize(k);
    return out;
  }

 private:
  const WordVectorStore* store_;
  std::array<std::optional<std::vector<double>>, kDomainCount> vectors_;
};

inline SuggestionList suggest_domains(std::string_view token, const WordVectorStore& store,
                                      std::size_t k) {
  return DomainEmbeddings(store).suggest(token, k);
}

}  // namespace apidomain
