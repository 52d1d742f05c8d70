#pragma once

// In-process stand-in for the handful of GitHub REST v3 endpoints the
// tracker client uses. Serves fixture data with real pagination and can be
// told to rate-limit, reject credentials or deny writes.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace mock {

using nlohmann::json;

struct Issue {
  std::int64_t number = 0;
  std::string title, body, state = "closed";
  std::optional<std::string> closed_at;
  std::vector<std::string> labels;
  std::vector<std::string> comments;
};

struct Pull {
  std::int64_t number = 0;
  std::string title, body, state = "closed";
  bool merged = true;
  std::vector<std::string> files;
  std::vector<std::string> commits;
};

struct Write {
  std::string path;
  json body;
};

class GitHub {
 public:
  GitHub(std::string owner = "acme", std::string repo = "widgets") : owner_(std::move(owner)), repo_(std::move(repo)) {
    const std::string base = "/repos/" + owner_ + "/" + repo_;
    server_.Get(base + "/issues", [this](const auto& q, auto& r) { list_issues(q, r); });
    server_.Get(base + R"(/issues/(\d+)/comments)", [this](const auto& q, auto& r) { comments(q, r); });
    server_.Get(base + R"(/issues/(\d+)/labels)", [this](const auto& q, auto& r) { issue_labels(q, r); });
    server_.Post(base + R"(/issues/(\d+)/labels)", [this](const auto& q, auto& r) { add_labels(q, r); });
    server_.Get(base + "/pulls", [this](const auto& q, auto& r) { list_pulls(q, r); });
    server_.Get(base + R"(/pulls/(\d+)/files)", [this](const auto& q, auto& r) { pull_files(q, r); });
    server_.Get(base + R"(/pulls/(\d+)/commits)", [this](const auto& q, auto& r) { pull_commits(q, r); });
    server_.Get(base + "/labels", [this](const auto& q, auto& r) { repo_labels(q, r); });
    server_.Post(base + "/labels", [this](const auto& q, auto& r) { create_label(q, r); });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~GitHub() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  GitHub(const GitHub&) = delete;
  GitHub& operator=(const GitHub&) = delete;

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::string slug() const { return owner_ + "/" + repo_; }

  /// {"issues":[...], "pulls":[...], "labels":[...]} as in tests/fixtures.
  void load(const json& j) {
    std::lock_guard lock(mu_);
    for (const auto& i : j.value("issues", json::array())) {
      Issue x;
      x.number = i.at("number");
      x.title = i.value("title", "");
      x.body = i.value("body", "");
      x.state = i.value("state", "closed");
      if (i.contains("closed_at") && i["closed_at"].is_string()) x.closed_at = i["closed_at"];
      x.labels = i.value("labels", std::vector<std::string>{});
      x.comments = i.value("comments", std::vector<std::string>{});
      issues_[x.number] = x;
    }
    for (const auto& p : j.value("pulls", json::array())) {
      Pull x;
      x.number = p.at("number");
      x.title = p.value("title", "");
      x.body = p.value("body", "");
      x.state = p.value("state", "closed");
      x.merged = p.value("merged", true);
      x.files = p.value("files", std::vector<std::string>{});
      x.commits = p.value("commits", std::vector<std::string>{});
      pulls_[x.number] = x;
    }
    for (const auto& l : j.value("labels", json::array())) repo_labels_.insert(l.get<std::string>());
  }

  void add_issue(Issue i) {
    std::lock_guard lock(mu_);
    issues_[i.number] = std::move(i);
  }
  void add_pull(Pull p) {
    std::lock_guard lock(mu_);
    pulls_[p.number] = std::move(p);
  }

  // knobs ---------------------------------------------------------------
  void require_token(std::string t) { std::lock_guard lock(mu_); token_ = std::move(t); }
  void rate_limit_next(int n, bool use_429 = false) {
    std::lock_guard lock(mu_);
    rate_limited_ = n;
    use_429_ = use_429;
  }
  void deny_writes(bool v) { std::lock_guard lock(mu_); deny_writes_ = v; }
  void fail_writes_for(std::int64_t issue) { std::lock_guard lock(mu_); failing_.insert(issue); }
  void fail_gets_with(int status, int n) {
    std::lock_guard lock(mu_);
    fail_status_ = status;
    fail_n_ = n;
  }

  // observations --------------------------------------------------------
  std::vector<Write> writes() const { std::lock_guard lock(mu_); return writes_; }
  std::size_t get_requests() const { std::lock_guard lock(mu_); return gets_; }
  std::size_t rate_limited_responses() const { std::lock_guard lock(mu_); return limited_sent_; }
  std::vector<std::string> labels_of(std::int64_t issue) const {
    std::lock_guard lock(mu_);
    return issues_.at(issue).labels;
  }
  std::set<std::string> repository_labels() const { std::lock_guard lock(mu_); return repo_labels_; }
  std::vector<std::string> authorization_headers() const { std::lock_guard lock(mu_); return auth_seen_; }

 private:
  // returns false when the request was answered with an error
  bool gate(const httplib::Request& q, httplib::Response& r, bool write) {
    auth_seen_.push_back(q.get_header_value("Authorization"));
    if (!token_.empty() && q.get_header_value("Authorization") != "token " + token_) {
      r.status = 401;
      r.set_content(R"({"message":"Bad credentials"})", "application/json");
      return false;
    }
    if (rate_limited_ > 0) {
      --rate_limited_;
      ++limited_sent_;
      r.status = use_429_ ? 429 : 403;
      r.set_header("X-RateLimit-Remaining", "0");
      r.set_content(R"({"message":"API rate limit exceeded"})", "application/json");
      return false;
    }
    if (!write && fail_n_ > 0) {
      --fail_n_;
      r.status = fail_status_;
      r.set_content(R"({"message":"boom"})", "application/json");
      return false;
    }
    if (write && deny_writes_) {
      r.status = 403;
      r.set_header("X-RateLimit-Remaining", "4999");
      r.set_content(R"({"message":"Resource not accessible by integration"})", "application/json");
      return false;
    }
    if (!write) ++gets_;
    return true;
  }

  static std::size_t param(const httplib::Request& q, const char* key, std::size_t def) {
    return q.has_param(key) ? static_cast<std::size_t>(std::stoul(q.get_param_value(key))) : def;
  }

  static void page(const httplib::Request& q, httplib::Response& r, const json& all) {
    const auto per = std::max<std::size_t>(1, param(q, "per_page", 30));
    const auto pg = std::max<std::size_t>(1, param(q, "page", 1));
    json out = json::array();
    for (std::size_t i = (pg - 1) * per; i < all.size() && i < pg * per; ++i) out.push_back(all[i]);
    r.set_content(out.dump(), "application/json");
  }

  static std::int64_t num(const httplib::Request& q) { return std::stoll(q.matches[1]); }

  void list_issues(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    const auto state = q.has_param("state") ? q.get_param_value("state") : "open";
    // the issues endpoint also lists pull requests, flagged by "pull_request"
    std::map<std::int64_t, json> merged;
    for (const auto& [n, i] : issues_) {
      if (state != "all" && i.state != state) continue;
      json j = {{"number", n}, {"title", i.title}, {"body", i.body}, {"state", i.state},
                {"comments", i.comments.size()}, {"closed_at", i.closed_at ? json(*i.closed_at) : json(nullptr)}};
      j["labels"] = json::array();
      for (const auto& l : i.labels) j["labels"].push_back({{"name", l}});
      merged[n] = j;
    }
    for (const auto& [n, p] : pulls_) {
      if (state != "all" && p.state != state) continue;
      merged[n] = {{"number", n}, {"title", p.title}, {"body", p.body}, {"state", p.state},
                   {"comments", 0}, {"pull_request", {{"url", "x"}}}};
    }
    json all = json::array();
    for (auto& [n, j] : merged) all.push_back(j);
    page(q, r, all);
  }

  void comments(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    json all = json::array();
    if (auto it = issues_.find(num(q)); it != issues_.end())
      for (const auto& c : it->second.comments) all.push_back({{"body", c}});
    page(q, r, all);
  }

  void issue_labels(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    auto it = issues_.find(num(q));
    if (it == issues_.end()) {
      r.status = 404;
      return;
    }
    json all = json::array();
    for (const auto& l : it->second.labels) all.push_back({{"name", l}});
    page(q, r, all);
  }

  void add_labels(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, true)) return;
    const auto n = num(q);
    if (failing_.count(n)) {
      r.status = 422;
      r.set_content(R"({"message":"Validation Failed"})", "application/json");
      return;
    }
    auto it = issues_.find(n);
    if (it == issues_.end()) {
      r.status = 404;
      return;
    }
    const auto body = json::parse(q.body);
    for (const auto& l : body.at("labels")) {
      const auto s = l.get<std::string>();
      if (std::find(it->second.labels.begin(), it->second.labels.end(), s) == it->second.labels.end())
        it->second.labels.push_back(s);
    }
    writes_.push_back({q.path, body});
    r.set_content("[]", "application/json");
  }

  void list_pulls(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    const auto state = q.has_param("state") ? q.get_param_value("state") : "open";
    json all = json::array();
    for (const auto& [n, p] : pulls_) {
      if (state != "all" && p.state != state) continue;
      json j = {{"number", n}, {"title", p.title}, {"body", p.body}, {"state", p.state}};
      j["merged_at"] = p.merged ? json("2023-01-01T00:00:00Z") : json(nullptr);
      all.push_back(j);
    }
    page(q, r, all);
  }

  void pull_files(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    json all = json::array();
    if (auto it = pulls_.find(num(q)); it != pulls_.end())
      for (const auto& f : it->second.files) all.push_back({{"filename", f}});
    page(q, r, all);
  }

  void pull_commits(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    json all = json::array();
    if (auto it = pulls_.find(num(q)); it != pulls_.end())
      for (const auto& m : it->second.commits) all.push_back({{"commit", {{"message", m}}}});
    page(q, r, all);
  }

  void repo_labels(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, false)) return;
    json all = json::array();
    for (const auto& l : repo_labels_) all.push_back({{"name", l}, {"color", "ededed"}});
    page(q, r, all);
  }

  void create_label(const httplib::Request& q, httplib::Response& r) {
    std::lock_guard lock(mu_);
    if (!gate(q, r, true)) return;
    const auto body = json::parse(q.body);
    repo_labels_.insert(body.at("name").get<std::string>());
    writes_.push_back({q.path, body});
    r.status = 201;
    r.set_content(body.dump(), "application/json");
  }

  std::string owner_, repo_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;

  mutable std::mutex mu_;
  std::map<std::int64_t, Issue> issues_;
  std::map<std::int64_t, Pull> pulls_;
  std::set<std::string> repo_labels_;
  std::string token_;
  int rate_limited_ = 0;
  bool use_429_ = false;
  bool deny_writes_ = false;
  int fail_status_ = 500;
  int fail_n_ = 0;
  std::set<std::int64_t> failing_;
  std::vector<Write> writes_;
  std::vector<std::string> auth_seen_;
  std::size_t gets_ = 0;
  std::size_t limited_sent_ = 0;
};

}  // namespace mock
