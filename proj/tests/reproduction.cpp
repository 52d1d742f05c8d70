// Headline numbers on the full replication data. Point
// APIDOMAIN_REPLICATION_DIR at a directory holding config.ini whose
// workspace has already been mined, parsed and classified for the projects
// jabref, rtts, audacity, powertoys (English) and cronos (Portuguese).
// Every check skips itself when the variable is unset.

#include <gtest/gtest.h>

#include <cstdlib>

#include "apidomain/app/experiment.hpp"

using namespace apidomain;

namespace {

constexpr double kTol = 0.03;

std::optional<ExperimentConfig> replication_config() {
  const char* dir = std::getenv("APIDOMAIN_REPLICATION_DIR");
  if (!dir || !*dir) return std::nullopt;
  auto cfg = load_config(std::filesystem::path(dir) / "config.ini");
  cfg.algorithm = Algorithm::forest;
  cfg.fields = CorpusFields::body;
  cfg.ngram = {1, 1};
  return cfg;
}

#define REQUIRE_REPLICATION(cfg)                                                  \
  auto cfg##_opt = replication_config();                                          \
  if (!cfg##_opt) GTEST_SKIP() << "APIDOMAIN_REPLICATION_DIR is not set";         \
  auto& cfg = *cfg##_opt

struct Mean {
  double p = 0, r = 0, f = 0;
};

Mean mean_micro(const std::vector<EvalReport>& reports) {
  Mean m;
  for (const auto& r : reports) {
    m.p += r.micro.precision;
    m.r += r.micro.recall;
    m.f += r.micro.f;
  }
  const double n = static_cast<double>(reports.size());
  return {m.p / n, m.r / n, m.f / n};
}

Mean per_project_mean(const ExperimentConfig& cfg) {
  const auto res = run_per_project(cfg, static_cast<unsigned>(default_jobs()));
  std::vector<EvalReport> all;
  for (const auto& [p, reps] : res.reports) all.insert(all.end(), reps.begin(), reps.end());
  return mean_micro(all);
}

ExperimentConfig english_only(ExperimentConfig cfg) {
  std::vector<ProjectConfig> keep;
  for (auto& p : cfg.projects)
    if (p.corpus_language == CorpusLanguage::en) keep.push_back(p);
  cfg.projects = keep;
  return cfg;
}

}  // namespace

TEST(Reproduction, ForestBodyUnigramsPerProject) {
  REQUIRE_REPLICATION(cfg);
  const auto m = per_project_mean(cfg);
  EXPECT_NEAR(m.p, 0.864, kTol);
  EXPECT_NEAR(m.r, 0.786, kTol);
  EXPECT_NEAR(m.f, 0.811, kTol);
}

TEST(Reproduction, MergedEnglishPrecisionDrop) {
  REQUIRE_REPLICATION(cfg);
  const auto en = english_only(cfg);
  const auto single = per_project_mean(en);
  const auto merged = mean_micro(run_merged(en, static_cast<unsigned>(default_jobs())).reports.at("merged"));
  const double change = (merged.p - single.p) / single.p;
  EXPECT_NEAR(change, -0.0915, kTol);
}

struct TransferRow {
  std::vector<std::string> train;
  std::string test;
  std::vector<std::string> subset;
  double p, r, f;
};

TEST(Reproduction, TransferRows) {
  REQUIRE_REPLICATION(cfg);
  const std::vector<TransferRow> rows = {
      {{"rtts", "audacity", "powertoys"}, "jabref", {}, 0.305, 0.294, 0.299},
      {{"jabref", "audacity", "powertoys"}, "rtts", {}, 0.713, 0.175, 0.281},
      {{"jabref", "rtts", "powertoys"}, "audacity", {}, 0.688, 0.284, 0.402},
      {{"jabref", "rtts", "audacity"}, "powertoys", {}, 0.296, 0.525, 0.379},
      {{"jabref", "audacity", "powertoys"}, "rtts", {"Network", "Logging", "Setup", "Microservices", "UI"}, 0.718,
       0.272, 0.394},
  };
  for (const auto& row : rows) {
    auto c = cfg;
    c.mode = ExperimentMode::transfer;
    c.transfer = {row.train, row.test, row.subset};
    const auto res = run_transfer(c);
    const auto& r = res.reports.at(row.test).front();
    SCOPED_TRACE(row.test + (row.subset.empty() ? "" : " (developer-rated labels)"));
    EXPECT_NEAR(r.micro.precision, row.p, kTol);
    EXPECT_NEAR(r.micro.recall, row.r, kTol);
    EXPECT_NEAR(r.micro.f, row.f, kTol);
  }
}
