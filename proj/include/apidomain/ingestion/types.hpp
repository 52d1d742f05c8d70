#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

namespace apidomain {

using json = nlohmann::json;

enum class IssueState { open, closed };

NLOHMANN_JSON_SERIALIZE_ENUM(IssueState, {{IssueState::open, "open"}, {IssueState::closed, "closed"}})

/// One tracker issue. `key` is the external identifier as written by the
/// tracker (e.g. "42" or "CRON-42"); `number` is its positive integer form.
struct Issue {
  std::string project_id;
  std::int64_t number = 0;
  std::string key;
  std::string title;
  std::string body;
  std::vector<std::string> comments;  // tracker order
  IssueState state = IssueState::closed;
  std::optional<std::string> closed_at;  // ISO-8601 UTC
  std::vector<std::string> existing_labels;

  friend bool operator==(const Issue&, const Issue&) = default;
};

/// A pull request or an equivalent revision from an industrial tracker.
struct ChangeSet {
  std::string project_id;
  std::int64_t number = 0;
  std::string ref;
  std::string title;
  std::string body;
  std::vector<std::string> changed_file_paths;  // deduplicated
  std::vector<std::string> commit_messages;
  bool merged = false;

  friend bool operator==(const ChangeSet&, const ChangeSet&) = default;
};

enum class LinkSource { reference_pattern, csv_key, revision_field };

NLOHMANN_JSON_SERIALIZE_ENUM(LinkSource, {{LinkSource::reference_pattern, "reference_pattern"},
                                          {LinkSource::csv_key, "csv_key"},
                                          {LinkSource::revision_field, "revision_field"}})

/// Link between an issue and a change of the same project, by number.
struct IssueChangeLink {
  std::string project_id;
  std::int64_t issue = 0;
  std::int64_t change = 0;
  LinkSource link_source = LinkSource::reference_pattern;

  friend bool operator==(const IssueChangeLink&, const IssueChangeLink&) = default;
  friend auto operator<=>(const IssueChangeLink& a, const IssueChangeLink& b) {
    return std::tie(a.project_id, a.change, a.issue, a.link_source) <=>
           std::tie(b.project_id, b.change, b.issue, b.link_source);
  }
};

inline void to_json(json& j, const Issue& i) {
  j = json{{"project_id", i.project_id}, {"number", i.number},   {"key", i.key},
           {"title", i.title},           {"body", i.body},       {"comments", i.comments},
           {"state", i.state},           {"existing_labels", i.existing_labels}};
  j["closed_at"] = i.closed_at ? json(*i.closed_at) : json(nullptr);
}

inline void from_json(const json& j, Issue& i) {
  j.at("project_id").get_to(i.project_id);
  j.at("number").get_to(i.number);
  i.key = j.value("key", std::to_string(i.number));
  i.title = j.value("title", "");
  i.body = j.value("body", "");
  i.comments = j.value("comments", std::vector<std::string>{});
  i.state = j.value("state", IssueState::closed);
  i.existing_labels = j.value("existing_labels", std::vector<std::string>{});
  if (j.contains("closed_at") && j["closed_at"].is_string())
    i.closed_at = j["closed_at"].get<std::string>();
  else
    i.closed_at.reset();
}

inline void to_json(json& j, const ChangeSet& c) {
  j = json{{"project_id", c.project_id},
           {"number", c.number},
           {"ref", c.ref},
           {"title", c.title},
           {"body", c.body},
           {"changed_file_paths", c.changed_file_paths},
           {"commit_messages", c.commit_messages},
           {"merged", c.merged}};
}

inline void from_json(const json& j, ChangeSet& c) {
  j.at("project_id").get_to(c.project_id);
  j.at("number").get_to(c.number);
  c.ref = j.value("ref", std::to_string(c.number));
  c.title = j.value("title", "");
  c.body = j.value("body", "");
  c.changed_file_paths = j.value("changed_file_paths", std::vector<std::string>{});
  c.commit_messages = j.value("commit_messages", std::vector<std::string>{});
  c.merged = j.value("merged", false);
}

inline void to_json(json& j, const IssueChangeLink& l) {
  j = json{{"project_id", l.project_id},
           {"issue", l.issue},
           {"change", l.change},
           {"link_source", l.link_source}};
}

inline void from_json(const json& j, IssueChangeLink& l) {
  j.at("project_id").get_to(l.project_id);
  j.at("issue").get_to(l.issue);
  j.at("change").get_to(l.change);
  l.link_source = j.value("link_source", LinkSource::reference_pattern);
}

/// Removes duplicates, keeping first-occurrence order.
inline std::vector<std::string> dedup_paths(const std::vector<std::string>& paths) {
  std::vector<std::string> out;
  for (const auto& p : paths)
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  return out;
}

}  // namespace apidomain
