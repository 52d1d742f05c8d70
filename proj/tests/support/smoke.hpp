#pragma once

// End-to-end run of the bundled smoke project against the local mock
// tracker: mine -> parse -> classify-apis -> build-dataset -> train ->
// evaluate -> predict -> apply-labels (dry run).

#include <filesystem>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "apidomain/app/cli.hpp"
#include "mock_github.hpp"

namespace smoke {

namespace fs = std::filesystem;

inline fs::path fixture_dir() { return fs::path(APIDOMAIN_FIXTURES) / "smoke"; }

struct Step {
  std::string command;
  int rc = 0;
  std::string out, err;
};

struct Run {
  fs::path root;
  std::vector<Step> steps;
  std::map<std::string, std::string> artifacts;  // workspace-relative path -> bytes

  bool ok() const {
    for (const auto& s : steps)
      if (s.rc != 0) return false;
    return !steps.empty();
  }
  std::string failure() const {
    for (const auto& s : steps)
      if (s.rc != 0) return s.command + " exited " + std::to_string(s.rc) + ": " + s.err;
    return {};
  }
};

inline auto factory_for(mock::GitHub& gh) {
  return [&gh](const apidomain::ProjectConfig& p, const std::string& token) -> std::unique_ptr<apidomain::Tracker> {
    auto c = apidomain::GitHubCoordinates::from_slug(gh.slug(), p.name);
    c.api_base = gh.base_url();
    c.page_size = 4;  // force pagination
    apidomain::RetryPolicy retry;
    retry.sleep = [](std::chrono::milliseconds) {};
    return std::make_unique<apidomain::GitHubTracker>(std::move(c), token, retry);
  };
}

inline void load_fixture(mock::GitHub& gh) {
  gh.load(nlohmann::json::parse(apidomain::text::read_file(fixture_dir() / "github.json")));
}

/// Copies the fixture into `into` and runs every stage there.
inline Run run_pipeline(mock::GitHub& gh, const fs::path& into, unsigned jobs = 2) {
  Run run;
  run.root = into / "smoke";
  fs::copy(fixture_dir(), run.root, fs::copy_options::recursive);
  const auto cfg = (run.root / "config.ini").string();
  const auto work = run.root / "work";
  const std::vector<std::vector<std::string>> stages = {
      {"mine"},
      {"parse"},
      {"classify-apis"},
      {"build-dataset"},
      {"train", "--dataset", (work / "jabref" / "dataset").string(), "-o", (work / "model.json").string()},
      {"evaluate"},
      {"evaluate", "--model", (work / "model.json").string(), "--dataset", (work / "jabref" / "dataset").string(), "-o",
       (work / "reports" / "evaluate").string()},
      {"predict", "--model", (work / "model.json").string(), "-p", "jabref", "-o", (work / "predictions.jsonl").string()},
      {"apply-labels", "--predictions", (work / "predictions.jsonl").string(), "-p", "jabref", "-o",
       (work / "apply.json").string()},
  };
  for (const auto& st : stages) {
    std::vector<std::string> args{"-c", cfg, "-j", std::to_string(jobs)};
    args.insert(args.end(), st.begin(), st.end());
    std::ostringstream out, err;
    std::istringstream in;
    Step s;
    s.command = st.front();
    s.rc = apidomain::cli::run(args, {out, err, in}, factory_for(gh));
    s.out = out.str();
    s.err = err.str();
    run.steps.push_back(s);
    if (s.rc != 0) return run;
  }
  for (const auto& e : fs::recursive_directory_iterator(work))
    if (e.is_regular_file())
      run.artifacts[fs::relative(e.path(), work).generic_string()] = apidomain::text::read_file(e.path());
  return run;
}

}  // namespace smoke
