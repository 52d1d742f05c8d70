#pragma once

#include <algorithm>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "apidomain/common/error.hpp"
#include "apidomain/common/parallel.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/ingestion/csv.hpp"
#include "apidomain/taxonomy/domain_map.hpp"
#include "apidomain/taxonomy/tokenize.hpp"
#include "apidomain/taxonomy/vectors.hpp"

namespace apidomain {

/// A token (or full namespace) awaiting or carrying an expert decision.
struct TokenRecord {
  std::string token;
  TokenPosition position = TokenPosition::first;
  std::size_t frequency = 0;  // namespaces producing this token
  std::vector<Suggestion> suggestions;
  bool out_of_vocabulary = false;
  std::vector<std::string> sample_namespaces;
  std::optional<ApiDomain> decision;
  DecidedBy decided_by = DecidedBy::unresolved;
};

inline std::string last_segment(std::string_view ns) {
  const auto cut = ns.find_last_of("./:\\");
  return text::to_lower_ascii(cut == std::string_view::npos ? ns : ns.substr(cut + 1));
}

/// Aggregates first/second tokens over distinct namespaces and attaches
/// similarity suggestions. One full_namespace record per namespace.
inline std::vector<TokenRecord> build_token_records(const std::set<std::string>& namespaces,
                                                    const std::set<std::string>& blocklist,
                                                    const DomainEmbeddings* embeddings,
                                                    std::size_t k = 3, unsigned jobs = 1) {
  std::map<std::pair<TokenPosition, std::string>, TokenRecord> agg;
  std::vector<TokenRecord> full;
  for (const auto& ns : namespaces) {
    for (const auto& t : tokenize_namespace(ns, blocklist)) {
      if (t.position == TokenPosition::full_namespace) {
        TokenRecord r;
        r.token = t.token;
        r.position = t.position;
        r.frequency = 1;
        r.sample_namespaces = {ns};
        full.push_back(std::move(r));
        continue;
      }
      auto& r = agg[{t.position, t.token}];
      r.token = t.token;
      r.position = t.position;
      ++r.frequency;
      if (r.sample_namespaces.size() < 3) r.sample_namespaces.push_back(ns);
    }
  }
  std::vector<TokenRecord> out;
  for (auto& [key, r] : agg) out.push_back(std::move(r));
  for (auto& r : full) out.push_back(std::move(r));
  if (embeddings) {
    parallel_for(out.size(), jobs, [&](std::size_t i) {
      auto& r = out[i];
      // Full namespaces are matched on their last segment (usually a class).
      auto s = embeddings->suggest(
          r.position == TokenPosition::full_namespace ? last_segment(r.token) : r.token, k);
      r.suggestions = std::move(s.ranked);
      r.out_of_vocabulary = s.out_of_vocabulary;
    });
  }
  return out;
}

struct ReviewChoice {
  enum class Kind { pick, accept_top, skip, quit } kind = Kind::skip;
  std::optional<ApiDomain> domain;
};

/// Source of review decisions: a terminal or a scripted replay.
class ReviewSource {
 public:
  virtual ~ReviewSource() = default;
  virtual ReviewChoice choose(const TokenRecord& record, std::size_t index, std::size_t total) = 0;
};

/// Replays a decisions CSV with columns position,token,decision where
/// decision is a domain name, "accept" (top suggestion) or "skip".
class ScriptedReview final : public ReviewSource {
 public:
  struct Row {
    TokenPosition position;
    std::string token;
    ReviewChoice choice;
  };

  explicit ScriptedReview(std::vector<Row> rows) {
    for (auto& r : rows) {
      const auto key = r.position == TokenPosition::full_namespace ? r.token : text::to_lower_ascii(r.token);
      choices_[{r.position, key}] = r.choice;
    }
  }

  /// Parses and validates every row before anything is applied.
  static ScriptedReview parse(std::string_view content) {
    const auto records = parse_csv(content);
    if (records.empty()) return ScriptedReview({});
    const auto& header = records.front().fields;
    auto col = [&](std::string_view name) -> std::size_t {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (text::iequals(text::trim(header[i]), name)) return i;
      throw ValidationError("decisions file lacks column '" + std::string(name) + "'");
    };
    const auto pos_i = col("position"), tok_i = col("token"), dec_i = col("decision");
    std::vector<Row> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
      const auto& f = records[i].fields;
      const auto line = std::to_string(records[i].line);
      if (f.size() != header.size()) throw ValidationError("decisions line " + line + ": wrong field count");
      Row row;
      try {
        row.position = parse_position(f[pos_i]);
      } catch (const std::invalid_argument& e) {
        throw ValidationError("decisions line " + line + ": " + e.what());
      }
      row.token = std::string(text::trim(f[tok_i]));
      const auto d = text::trim(f[dec_i]);
      if (text::iequals(d, "accept")) {
        row.choice.kind = ReviewChoice::Kind::accept_top;
      } else if (text::iequals(d, "skip") || d.empty()) {
        row.choice.kind = ReviewChoice::Kind::skip;
      } else if (auto dom = find_domain(d)) {
        row.choice = {ReviewChoice::Kind::pick, dom};
      } else {
        throw ValidationError("decisions line " + line + ": unknown API domain '" + std::string(d) + "'");
      }
      rows.push_back(std::move(row));
    }
    return ScriptedReview(std::move(rows));
  }

  static ScriptedReview load(const std::filesystem::path& path) { return parse(text::read_file(path)); }

  ReviewChoice choose(const TokenRecord& r, std::size_t, std::size_t) override {
    const auto key = r.position == TokenPosition::full_namespace ? r.token : text::to_lower_ascii(r.token);
    auto it = choices_.find({r.position, key});
    return it == choices_.end() ? ReviewChoice{} : it->second;
  }

 private:
  std::map<std::pair<TokenPosition, std::string>, ReviewChoice> choices_;
};

/// Terminal prompts: a suggestion number, a domain name, 's' to skip or
/// 'q' to stop (decisions so far are kept).
class InteractiveReview final : public ReviewSource {
 public:
  InteractiveReview(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  ReviewChoice choose(const TokenRecord& r, std::size_t index, std::size_t total) override {
    out_ << "\n[" << to_string(r.position) << " " << index + 1 << "/" << total << "] '" << r.token
         << "'  frequency " << r.frequency << "\n";
    if (!r.sample_namespaces.empty())
      out_ << "  e.g. " << text::join(r.sample_namespaces, ", ") << "\n";
    if (r.out_of_vocabulary) out_ << "  (no vector for this token)\n";
    for (std::size_t i = 0; i < r.suggestions.size(); ++i)
      out_ << "  " << i + 1 << ") " << name(r.suggestions[i].domain) << " " << std::fixed
           << std::setprecision(3) << r.suggestions[i].score << "\n";
    for (;;) {
      out_ << "choice [number | domain | s=skip | q=quit]: " << std::flush;
      std::string line;
      if (!std::getline(in_, line)) return {ReviewChoice::Kind::quit, std::nullopt};
      const auto t = text::trim(line);
      if (t.empty() || t == "s") return {ReviewChoice::Kind::skip, std::nullopt};
      if (t == "q") return {ReviewChoice::Kind::quit, std::nullopt};
      if (std::all_of(t.begin(), t.end(), ::isdigit)) {
        const auto n = std::stoul(std::string(t));
        if (n >= 1 && n <= r.suggestions.size())
          return {ReviewChoice::Kind::pick, r.suggestions[n - 1].domain};
      } else if (auto d = find_domain(t)) {
        return {ReviewChoice::Kind::pick, d};
      }
      out_ << "  not a suggestion number or domain name\n";
    }
  }

 private:
  std::istream& in_;
  std::ostream& out_;
};

struct ReviewOutcome {
  DomainMap map;
  std::size_t decided = 0;
  std::size_t skipped = 0;
  bool quit = false;
};

/// Walks first tokens by descending frequency, then second tokens, then the
/// namespaces still unresolved. Already-decided keys are not asked again, so
/// a resumed session continues where the previous one stopped. Each
/// decision is handed to `persist` as soon as it is made.
inline ReviewOutcome review_session(
    std::vector<TokenRecord> records, DomainMap map, ReviewSource& source,
    const std::set<std::string>& blocklist,
    const std::function<void(const DomainMapEntry&)>& persist = {}) {
  ReviewOutcome outcome;
  auto by_frequency = [](const TokenRecord& a, const TokenRecord& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.token < b.token;
  };
  auto decide = [&](TokenRecord& r, std::size_t index, std::size_t total) {
    auto choice = source.choose(r, index, total);
    if (choice.kind == ReviewChoice::Kind::quit) {
      outcome.quit = true;
      return;
    }
    if (choice.kind == ReviewChoice::Kind::skip) {
      ++outcome.skipped;
      return;
    }
    if (choice.kind == ReviewChoice::Kind::accept_top) {
      if (r.suggestions.empty()) {
        ++outcome.skipped;
        return;
      }
      choice.domain = r.suggestions.front().domain;
    }
    DomainDecision d{*choice.domain, DecidedBy::expert, std::nullopt};
    if (!r.suggestions.empty() && r.suggestions.front().domain == d.domain) d.decided_by = DecidedBy::nlp_accepted;
    for (const auto& s : r.suggestions)
      if (s.domain == d.domain) d.score = s.score;
    map.set(r.position, r.token, d);
    r.decision = d.domain;
    r.decided_by = d.decided_by;
    ++outcome.decided;
    if (persist) persist({r.position, r.token, d});
  };

  for (auto pos : {TokenPosition::first, TokenPosition::second}) {
    std::vector<TokenRecord*> round;
    for (auto& r : records)
      if (r.position == pos && !map.decided(pos, r.token)) round.push_back(&r);
    std::sort(round.begin(), round.end(), [&](auto* a, auto* b) { return by_frequency(*a, *b); });
    for (std::size_t i = 0; i < round.size() && !outcome.quit; ++i) decide(*round[i], i, round.size());
    if (outcome.quit) break;
  }
  if (!outcome.quit) {
    std::vector<TokenRecord*> round;
    for (auto& r : records)
      if (r.position == TokenPosition::full_namespace && !classify_namespace(r.token, map, blocklist))
        round.push_back(&r);
    std::sort(round.begin(), round.end(), [](auto* a, auto* b) { return a->token < b->token; });
    for (std::size_t i = 0; i < round.size() && !outcome.quit; ++i) decide(*round[i], i, round.size());
  }
  outcome.map = std::move(map);
  return outcome;
}

}  // namespace apidomain
