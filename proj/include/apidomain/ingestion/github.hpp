#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "apidomain/common/error.hpp"
#include "apidomain/ingestion/types.hpp"

namespace apidomain {

/// Read/write access to an issue tracker. Fetches are sequential per
/// project; returned records are plain values.
class Tracker {
 public:
  virtual ~Tracker() = default;
  virtual std::vector<Issue> fetch_issues(IssueState state,
                                          const std::optional<std::string>& since) = 0;
  /// Merged-and-closed change sets only.
  virtual std::vector<ChangeSet> fetch_changes() = 0;
  virtual std::vector<std::string> issue_labels(std::int64_t number) = 0;
  virtual std::vector<std::string> repository_labels() = 0;
  virtual void create_label(const std::string& name, const std::string& color) = 0;
  virtual void add_labels(std::int64_t number, const std::vector<std::string>& labels) = 0;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_delay{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{64000};
  int max_retries = 8;
  std::function<void(std::chrono::milliseconds)> sleep = [](std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
  };

  [[nodiscard]] std::chrono::milliseconds delay(int attempt) const {
    double d = static_cast<double>(initial_delay.count());
    for (int i = 0; i < attempt; ++i) d *= factor;
    return std::chrono::milliseconds(
        static_cast<std::int64_t>(std::min<double>(d, static_cast<double>(max_delay.count()))));
  }
};

struct GitHubCoordinates {
  std::string api_base = "https://api.github.com";
  std::string owner;
  std::string repo;
  std::string project_id;
  std::size_t page_size = 100;

  /// "owner/name" form.
  static GitHubCoordinates from_slug(const std::string& slug, std::string project_id) {
    const auto slash = slug.find('/');
    if (slash == std::string::npos || slash == 0 || slash + 1 == slug.size())
      throw ConfigError("repository must be given as owner/name, got '" + slug + "'");
    GitHubCoordinates c;
    c.owner = slug.substr(0, slash);
    c.repo = slug.substr(slash + 1);
    c.project_id = std::move(project_id);
    return c;
  }
};

/// GitHub REST v3 client (issues, issue comments, pulls, pull files and
/// commits, labels).
class GitHubTracker final : public Tracker {
 public:
  GitHubTracker(GitHubCoordinates coords, std::string token, RetryPolicy retry = {})
      : coords_(std::move(coords)), token_(std::move(token)), retry_(std::move(retry)) {
    const auto& base = coords_.api_base;
    const auto scheme_end = base.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = base.find('/', host_start);
    origin_ = path_start == std::string::npos ? base : base.substr(0, path_start);
    prefix_ = path_start == std::string::npos ? "" : base.substr(path_start);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    client_ = std::make_unique<httplib::Client>(origin_);
    client_->set_connection_timeout(10);
    client_->set_read_timeout(60);
  }

  std::vector<Issue> fetch_issues(IssueState state,
                                  const std::optional<std::string>& since) override {
    std::string query = "state=" + std::string(state == IssueState::open ? "open" : "closed") +
                        "&sort=created&direction=asc";
    if (since) query += "&since=" + *since;
    std::vector<Issue> out;
    for (const auto& item : get_all(repo_path("/issues"), query)) {
      if (item.contains("pull_request")) continue;
      Issue issue;
      issue.project_id = coords_.project_id;
      issue.number = item.at("number").get<std::int64_t>();
      issue.key = std::to_string(issue.number);
      issue.title = string_or_empty(item, "title");
      issue.body = string_or_empty(item, "body");
      issue.state = string_or_empty(item, "state") == "open" ? IssueState::open : IssueState::closed;
      if (item.contains("closed_at") && item["closed_at"].is_string())
        issue.closed_at = item["closed_at"].get<std::string>();
      if (item.contains("labels"))
        for (const auto& l : item["labels"]) issue.existing_labels.push_back(string_or_empty(l, "name"));
      if (item.value("comments", 0) > 0) {
        const auto path = repo_path("/issues/" + std::to_string(issue.number) + "/comments");
        for (const auto& c : get_all(path, "")) issue.comments.push_back(string_or_empty(c, "body"));
      }
      out.push_back(std::move(issue));
    }
    std::sort(out.begin(), out.end(), [](const Issue& a, const Issue& b) { return a.number < b.number; });
    return out;
  }

  std::vector<ChangeSet> fetch_changes() override {
    std::vector<ChangeSet> out;
    for (const auto& item : get_all(repo_path("/pulls"), "state=closed&sort=created&direction=asc")) {
      if (!item.contains("merged_at") || !item["merged_at"].is_string()) continue;
      ChangeSet c;
      c.project_id = coords_.project_id;
      c.number = item.at("number").get<std::int64_t>();
      c.ref = std::to_string(c.number);
      c.title = string_or_empty(item, "title");
      c.body = string_or_empty(item, "body");
      c.merged = true;
      const auto base = repo_path("/pulls/" + std::to_string(c.number));
      for (const auto& f : get_all(base + "/files", ""))
        c.changed_file_paths.push_back(string_or_empty(f, "filename"));
      c.changed_file_paths = dedup_paths(c.changed_file_paths);
      for (const auto& commit : get_all(base + "/commits", ""))
        if (commit.contains("commit")) c.commit_messages.push_back(string_or_empty(commit["commit"], "message"));
      out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(),
              [](const ChangeSet& a, const ChangeSet& b) { return a.number < b.number; });
    return out;
  }

  std::vector<std::string> issue_labels(std::int64_t number) override {
    std::vector<std::string> out;
    for (const auto& l : get_all(repo_path("/issues/" + std::to_string(number) + "/labels"), ""))
      out.push_back(string_or_empty(l, "name"));
    return out;
  }

  std::vector<std::string> repository_labels() override {
    std::vector<std::string> out;
    for (const auto& l : get_all(repo_path("/labels"), "")) out.push_back(string_or_empty(l, "name"));
    return out;
  }

  void create_label(const std::string& name, const std::string& color) override {
    send_write(repo_path("/labels"), json{{"name", name}, {"color", color}});
  }

  void add_labels(std::int64_t number, const std::vector<std::string>& labels) override {
    send_write(repo_path("/issues/" + std::to_string(number) + "/labels"), json{{"labels", labels}});
  }

 private:
  static std::string string_or_empty(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) return {};
    return j[key].get<std::string>();
  }

  [[nodiscard]] std::string repo_path(const std::string& tail) const {
    return prefix_ + "/repos/" + coords_.owner + "/" + coords_.repo + tail;
  }

  [[nodiscard]] httplib::Headers headers() const {
    httplib::Headers h{{"Accept", "application/vnd.github+json"},
                       {"User-Agent", "apidomain-labeler"}};
    if (!token_.empty()) h.emplace("Authorization", "token " + token_);
    return h;
  }

  static bool rate_limited(const httplib::Response& r) {
    if (r.status == 429) return true;
    return r.status == 403 && r.has_header("X-RateLimit-Remaining") &&
           r.get_header_value("X-RateLimit-Remaining") == "0";
  }

  template <typename Send>
  httplib::Response with_retry(const std::string& cursor, Send&& send) {
    for (int attempt = 0;; ++attempt) {
      auto result = send();
      if (!result)
        throw TransientError("network failure: " + httplib::to_string(result.error()), cursor);
      const auto& r = *result;
      if (r.status == 401) throw CredentialError("tracker rejected credentials (401)");
      if (rate_limited(r)) {
        if (attempt >= retry_.max_retries)
          throw RateLimitError("rate limit persisted after " + std::to_string(retry_.max_retries) +
                               " retries at " + cursor);
        const auto d = retry_.delay(attempt);
        spdlog::warn("rate limited at {}; retrying in {} ms", cursor, d.count());
        retry_.sleep(d);
        continue;
      }
      if (r.status == 403) throw PermissionError("tracker denied access (403) at " + cursor);
      if (r.status >= 500) throw TransientError("server error " + std::to_string(r.status), cursor);
      if (r.status < 200 || r.status >= 300)
        throw RemoteError("unexpected status " + std::to_string(r.status) + " at " + cursor);
      return r;
    }
  }

  /// Follows numbered pages until a short page.
  std::vector<json> get_all(const std::string& path, const std::string& query) {
    std::vector<json> out;
    for (std::size_t page = 1;; ++page) {
      std::string target = path + "?" + (query.empty() ? "" : query + "&") +
                           "per_page=" + std::to_string(coords_.page_size) +
                           "&page=" + std::to_string(page);
      auto r = with_retry(target, [&] { return client_->Get(target, headers()); });
      json items;
      try {
        items = json::parse(r.body);
      } catch (const json::parse_error& e) {
        throw RemoteError("malformed JSON from " + target + ": " + e.what());
      }
      if (!items.is_array()) throw RemoteError("expected a JSON array from " + target);
      for (auto& it : items) out.push_back(std::move(it));
      if (items.size() < coords_.page_size) break;
    }
    return out;
  }

  void send_write(const std::string& path, const json& body) {
    auto r = with_retry(path, [&] {
      return client_->Post(path, headers(), body.dump(), "application/json");
    });
    (void)r;
  }

  GitHubCoordinates coords_;
  std::string token_;
  RetryPolicy retry_;
  std::string origin_;
  std::string prefix_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace apidomain
