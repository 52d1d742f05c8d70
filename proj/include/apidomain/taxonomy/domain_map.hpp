#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "apidomain/common/error.hpp"
#include "apidomain/common/text.hpp"
#include "apidomain/taxonomy/domain.hpp"
#include "apidomain/taxonomy/tokenize.hpp"

namespace apidomain {

using json = nlohmann::json;

enum class DecidedBy { expert, nlp_accepted, unresolved };

NLOHMANN_JSON_SERIALIZE_ENUM(DecidedBy, {{DecidedBy::expert, "expert"},
                                         {DecidedBy::nlp_accepted, "nlp_accepted"},
                                         {DecidedBy::unresolved, "unresolved"}})

struct DomainDecision {
  ApiDomain domain;
  DecidedBy decided_by = DecidedBy::expert;
  std::optional<double> score;  // similarity of the chosen domain when decided

  friend bool operator==(const DomainDecision&, const DomainDecision&) = default;
};

/// One persisted line of a domain map.
struct DomainMapEntry {
  TokenPosition position;
  std::string token;  // namespace as written for full_namespace entries
  DomainDecision decision;
};

inline void to_json(json& j, const DomainMapEntry& e) {
  j = json{{"token", e.token},
           {"position", e.position},
           {"domain", std::string(name(e.decision.domain))},
           {"decided_by", e.decision.decided_by}};
  j["score"] = e.decision.score ? json(*e.decision.score) : json(nullptr);
}

inline void from_json(const json& j, DomainMapEntry& e) {
  e.token = j.at("token").get<std::string>();
  e.position = j.at("position").get<TokenPosition>();
  e.decision.domain = parse_domain(j.at("domain").get<std::string>());
  e.decision.decided_by = j.value("decided_by", DecidedBy::expert);
  if (j.contains("score") && j["score"].is_number()) e.decision.score = j["score"].get<double>();
}

/// Token rules keyed by (position, token) plus full-namespace overrides.
/// Copies share state until one of them is modified.
class DomainMap {
 public:
  using TokenKey = std::pair<TokenPosition, std::string>;

  DomainMap() : state_(std::make_shared<State>()) {}

  void set(TokenPosition position, const std::string& token, DomainDecision d) {
    if (d.decided_by == DecidedBy::unresolved)
      throw ValidationError("a stored decision cannot be marked unresolved");
    auto& s = mutable_state();
    if (position == TokenPosition::full_namespace)
      s.overrides[token] = d;
    else
      s.rules[{position, text::to_lower_ascii(token)}] = d;
    s.log.push_back({position, token, d});
  }

  [[nodiscard]] std::optional<DomainDecision> rule(TokenPosition position,
                                                   const std::string& token) const {
    if (position == TokenPosition::full_namespace) return override_for(token);
    auto it = state_->rules.find({position, text::to_lower_ascii(token)});
    if (it == state_->rules.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] std::optional<DomainDecision> override_for(const std::string& ns) const {
    auto it = state_->overrides.find(ns);
    if (it == state_->overrides.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] bool decided(TokenPosition position, const std::string& token) const {
    return rule(position, token).has_value();
  }

  [[nodiscard]] std::size_t size() const { return state_->rules.size() + state_->overrides.size(); }

  /// Current decisions, one entry per key, in key order.
  [[nodiscard]] std::vector<DomainMapEntry> entries() const {
    std::vector<DomainMapEntry> out;
    for (const auto& [k, d] : state_->rules) out.push_back({k.first, k.second, d});
    for (const auto& [ns, d] : state_->overrides) out.push_back({TokenPosition::full_namespace, ns, d});
    return out;
  }

  friend bool operator==(const DomainMap& a, const DomainMap& b) {
    return a.state_->rules == b.state_->rules && a.state_->overrides == b.state_->overrides;
  }

  /// Replays an append-only JSONL log; later lines win.
  static DomainMap load(const std::filesystem::path& path) {
    DomainMap map;
    if (!std::filesystem::exists(path)) return map;
    std::ifstream in(path);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (text::trim(line).empty()) continue;
      DomainMapEntry e;
      try {
        e = json::parse(line).get<DomainMapEntry>();
      } catch (const json::exception& ex) {
        throw DecodeError(path.string() + ": " + ex.what(), lineno);
      } catch (const ValidationError& ex) {
        throw DecodeError(path.string() + ": " + ex.what(), lineno);
      }
      map.set(e.position, e.token, e.decision);
    }
    return map;
  }

  /// Writes the compacted map (one line per key).
  void save(const std::filesystem::path& path) const {
    std::string out;
    for (const auto& e : entries()) out += json(e).dump() + "\n";
    text::write_file(path, out);
  }

 private:
  struct State {
    std::map<TokenKey, DomainDecision> rules;
    std::map<std::string, DomainDecision> overrides;
    std::vector<DomainMapEntry> log;
  };

  State& mutable_state() {
    if (state_.use_count() > 1) state_ = std::make_shared<State>(*state_);
    return *state_;
  }

  std::shared_ptr<State> state_;
};

/// Appends one decision to a map log file and flushes it.
inline void append_decision(const std::filesystem::path& path, const DomainMapEntry& e) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app);
  if (!out) throw UserError("cannot append to " + path.string());
  out << json(e).dump() << '\n';
  out.flush();
}

/// Full-namespace override, else second-token rule, else first-token rule.
inline std::optional<ApiDomain> classify_namespace(const std::string& ns, const DomainMap& map,
                                                   const std::set<std::string>& blocklist) {
  if (auto o = map.override_for(ns)) return o->domain;
  const auto tokens = tokenize_namespace(ns, blocklist);
  for (auto pos : {TokenPosition::second, TokenPosition::first}) {
    for (const auto& t : tokens)
      if (t.position == pos)
        if (auto r = map.rule(pos, t.token)) return r->domain;
  }
  return std::nullopt;
}

inline std::optional<ApiDomain> classify_namespace(const std::string& ns, const DomainMap& map) {
  return classify_namespace(ns, map, builtin_blocklist());
}

}  // namespace apidomain
