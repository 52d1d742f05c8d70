#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <tuple>

#include "apidomain/common/rng.hpp"
#include "apidomain/eval/report.hpp"
#include "apidomain/eval/stats.hpp"

using namespace apidomain;

namespace {

LabelMatrix lm(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> v) { return LabelMatrix(rows, cols, std::move(v)); }

// Table rows are printed as TN FP FN TP.
LabelCounts row(std::size_t tn, std::size_t fp, std::size_t fn, std::size_t tp) { return {tp, fp, fn, tn}; }

// Exact null distribution of U for untied samples: f(n, m, u) = f(n-1, m, u-m) + f(n, m-1, u).
double exact_untied_p(std::size_t n, std::size_t m, double u) {
  std::map<std::tuple<std::size_t, std::size_t, long>, double> memo;
  std::function<double(std::size_t, std::size_t, long)> f = [&](std::size_t a, std::size_t b, long k) -> double {
    if (k < 0) return 0.0;
    if (a == 0 || b == 0) return k == 0 ? 1.0 : 0.0;
    const auto key = std::make_tuple(a, b, k);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    return memo[key] = f(a - 1, b, k - static_cast<long>(b)) + f(a, b - 1, k);
  };
  const double mu = static_cast<double>(n * m) / 2.0;
  double total = 0.0, extreme = 0.0;
  for (long k = 0; k <= static_cast<long>(n * m); ++k) {
    const double c = f(n, m, k);
    total += c;
    if (std::abs(static_cast<double>(k) - mu) >= std::abs(u - mu) - 1e-9) extreme += c;
  }
  return extreme / total;
}

CliffsDelta brute_cliff(const std::vector<double>& a, const std::vector<double>& b) {
  long s = 0;
  for (double x : a)
    for (double y : b) s += (x > y) - (x < y);
  return {static_cast<double>(s) / static_cast<double>(a.size() * b.size()), {}};
}

}  // namespace

TEST(Confusion, CountsPerLabel) {
  const auto truth = lm(4, 2, {1, 0, 1, 1, 0, 0, 0, 1});
  const auto pred = lm(4, 2, {1, 1, 0, 1, 0, 0, 1, 0});
  const auto c = confusion(truth, pred);
  ASSERT_EQ(c.size(), 2u);
  // label 0: tp r0, fn r1, tn r2, fp r3; label 1: fp r0, tp r1, tn r2, fn r3
  EXPECT_EQ(c[0], (LabelCounts{1, 1, 1, 1}));
  EXPECT_EQ(c[1], (LabelCounts{1, 1, 1, 1}));
  const auto pred2 = lm(4, 2, {1, 0, 1, 1, 0, 0, 1, 1});
  EXPECT_EQ(confusion(truth, pred2)[1], (LabelCounts{2, 0, 0, 2}));
  EXPECT_THROW(confusion(truth, lm(3, 2, std::vector<std::uint8_t>(6))), ParameterError);
}

TEST(Metrics, PublishedAllProjectsRows) {
  const auto app = label_metrics(row(80, 22, 19, 60));
  EXPECT_NEAR(app.precision, 0.73, 0.01);
  EXPECT_NEAR(app.recall, 0.75, 0.01);
  const auto eh = label_metrics(row(162, 1, 8, 10));
  EXPECT_NEAR(eh.precision, 0.90, 0.01);
  EXPECT_NEAR(eh.recall, 0.55, 0.01);
  const auto apm = micro_metrics({row(112, 4, 2, 24)});
  EXPECT_NEAR(apm.precision, 0.85, 0.01);
  EXPECT_NEAR(apm.recall, 0.92, 0.01);
  EXPECT_NEAR(apm.f, 0.88, 0.01);
  // oracle: plain ratios
  EXPECT_DOUBLE_EQ(app.precision, 60.0 / 82.0);
  EXPECT_DOUBLE_EQ(app.f, 2.0 * 60 / (2.0 * 60 + 22 + 19));
}

TEST(Metrics, PerfectPredictions) {
  const auto y = lm(3, 3, {1, 0, 1, 0, 1, 0, 1, 1, 0});
  const auto c = confusion(y, y);
  for (const auto& m : {micro_metrics(c), macro_metrics(c)}) {
    EXPECT_DOUBLE_EQ(m.precision, 1.0);
    EXPECT_DOUBLE_EQ(m.recall, 1.0);
    EXPECT_DOUBLE_EQ(m.f, 1.0);
  }
  EXPECT_DOUBLE_EQ(hamming_loss(y, y), 0.0);
}

TEST(Metrics, MacroIsMeanOfLabels) {
  // label 0: P=R=F=1; label 1: P=R=F=0.5
  const ConfusionCounts c{{2, 0, 0, 2}, {1, 1, 1, 1}};
  const auto m = macro_metrics(c);
  EXPECT_DOUBLE_EQ(m.precision, 0.75);
  EXPECT_DOUBLE_EQ(m.recall, 0.75);
  EXPECT_DOUBLE_EQ(m.f, 0.75);
}

TEST(Metrics, MacroEqualsMicroForIdenticalLabelsOnly) {
  const ConfusionCounts same{{3, 1, 2, 4}, {3, 1, 2, 4}, {3, 1, 2, 4}};
  const auto mi = micro_metrics(same), ma = macro_metrics(same);
  EXPECT_DOUBLE_EQ(mi.precision, ma.precision);
  EXPECT_DOUBLE_EQ(mi.recall, ma.recall);
  EXPECT_DOUBLE_EQ(mi.f, ma.f);
  const ConfusionCounts skew{{90, 10, 0, 0}, {1, 9, 0, 90}};
  EXPECT_GT(std::abs(micro_metrics(skew).precision - macro_metrics(skew).precision), 0.1);
}

TEST(Metrics, DegenerateFlags) {
  const auto m = label_metrics({0, 0, 0, 5});
  EXPECT_TRUE(m.precision_undefined);
  EXPECT_TRUE(m.recall_undefined);
  EXPECT_TRUE(m.f_undefined);
  EXPECT_EQ(m.precision, 0.0);
  const auto p = label_metrics({0, 0, 3, 2});
  EXPECT_TRUE(p.precision_undefined);
  EXPECT_FALSE(p.recall_undefined);
  EXPECT_FALSE(p.f_undefined);
  EXPECT_THROW(macro_metrics({}), ParameterError);
}

TEST(Hamming, ValuesSymmetryPermutation) {
  const auto a = lm(2, 2, {1, 0, 0, 1});
  const auto b = lm(2, 2, {0, 1, 1, 0});
  const auto c = lm(2, 2, {1, 1, 0, 1});
  EXPECT_DOUBLE_EQ(hamming_loss(a, a), 0.0);
  EXPECT_DOUBLE_EQ(hamming_loss(a, b), 1.0);
  EXPECT_DOUBLE_EQ(hamming_loss(a, c), 0.25);
  EXPECT_DOUBLE_EQ(hamming_loss(c, a), 0.25);
  Rng rng(3);
  LabelMatrix t(20, 5), p(20, 5);
  for (auto& v : t.data()) v = (rng.uniform01() < 0.4);
  for (auto& v : p.data()) v = (rng.uniform01() < 0.4);
  std::vector<std::size_t> rows(20), cols{4, 2, 0, 1, 3};
  std::iota(rows.begin(), rows.end(), 0);
  rng.shuffle(rows.begin(), rows.end());
  const auto h = hamming_loss(t, p);
  EXPECT_DOUBLE_EQ(hamming_loss(t.select_rows(rows).select_cols(cols), p.select_rows(rows).select_cols(cols)), h);
  EXPECT_EQ(micro_metrics(confusion(t.select_cols(cols), p.select_cols(cols))).f, micro_metrics(confusion(t, p)).f);
}

TEST(MannWhitney, IdenticalSamples) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const auto r = mann_whitney_u(a, a);
  EXPECT_DOUBLE_EQ(r.u, 12.5);
  EXPECT_NEAR(r.p, 1.0, 1e-12);
  EXPECT_FALSE(r.significant());
}

TEST(MannWhitney, SeparatedSamples) {
  const std::vector<double> a{1, 2, 3}, b{10, 20, 30};
  const auto r = mann_whitney_u(a, b);
  EXPECT_DOUBLE_EQ(r.u, 0.0);
  const auto e = mann_whitney_u_exact(a, b);
  EXPECT_DOUBLE_EQ(e.u, 0.0);
  EXPECT_DOUBLE_EQ(e.p, 0.1);  // 2 of 20 assignments
  EXPECT_THROW(mann_whitney_u({}, b), ParameterError);
}

TEST(MannWhitney, ExactMatchesIndependentRecurrence) {
  Rng rng(11);
  for (std::size_t n = 1; n <= 7; ++n)
    for (std::size_t m = 1; m <= 7; ++m)
      for (int t = 0; t < 5; ++t) {
        std::vector<double> a(n), b(m);
        for (auto& x : a) x = rng.uniform01();
        for (auto& x : b) x = rng.uniform01();
        const auto e = mann_whitney_u_exact(a, b);
        EXPECT_NEAR(e.p, exact_untied_p(n, m, e.u), 1e-12) << n << "x" << m;
      }
}

TEST(MannWhitney, ApproximationCloseToExactUpToEight) {
  Rng rng(12);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 8; ++n)
    for (std::size_t m = 1; m <= 8; ++m)
      for (int t = 0; t < 40; ++t) {
        std::vector<double> a(n), b(m);
        const bool ties = t % 2 == 1;
        for (auto& x : a) x = ties ? static_cast<double>(rng.uniform_index(5)) : rng.uniform01();
        for (auto& x : b) x = ties ? static_cast<double>(rng.uniform_index(5)) + (t % 4 == 1 ? 1.0 : 0.0) : rng.uniform01() + 0.3;
        const auto approx = mann_whitney_u(a, b), exact = mann_whitney_u_exact(a, b);
        ASSERT_DOUBLE_EQ(approx.u, exact.u);
        worst = std::max(worst, std::abs(approx.p - exact.p));
        EXPECT_LE(std::abs(approx.p - exact.p), 0.02) << n << "x" << m << " trial " << t;
      }
  RecordProperty("worst_abs_error", std::to_string(worst));
}

TEST(MannWhitney, DynamicProgramMatchesEnumerationWithTies) {
  Rng rng(14);
  for (std::size_t n = 1; n <= 9; ++n)
    for (std::size_t m = 1; m <= 9; ++m)
      for (int t = 0; t < 6; ++t) {
        std::vector<double> a(n), b(m);
        for (auto& x : a) x = static_cast<double>(rng.uniform_index(4));
        for (auto& x : b) x = static_cast<double>(rng.uniform_index(4 + t % 3));
        const auto d = mann_whitney_u_dp(a, b), e = mann_whitney_u_exact(a, b);
        EXPECT_DOUBLE_EQ(d.u, e.u);
        EXPECT_NEAR(d.p, e.p, 1e-12) << n << "x" << m;
      }
}

// Past the exact range, untied samples: the approximation against the
// exact distribution at 40-60 per sample.
TEST(MannWhitney, NormalApproximationLargeUntied) {
  Rng rng(15);
  for (std::size_t n : {40u, 60u})
    for (int t = 0; t < 5; ++t) {
      std::vector<double> a(n), b(n);
      for (auto& x : a) x = rng.uniform01();
      for (auto& x : b) x = rng.uniform01() + 0.05 * t;
      EXPECT_NEAR(mann_whitney_u_normal(a, b).p, mann_whitney_u_dp(a, b).p, 0.002) << n << " shift " << t;
    }
  std::vector<double> big(70, 1.0), other(70, 2.0);
  EXPECT_LT(mann_whitney_u(big, other).p, 1e-20);  // normal path (N > limit)
}

TEST(CliffsDelta, BruteForceAntisymmetryMagnitude) {
  Rng rng(13);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> a(1 + rng.uniform_index(15)), b(1 + rng.uniform_index(15));
    for (auto& x : a) x = static_cast<double>(rng.uniform_index(6));
    for (auto& x : b) x = static_cast<double>(rng.uniform_index(6));
    const auto d = cliffs_delta(a, b);
    EXPECT_EQ(d.d, brute_cliff(a, b).d);
    EXPECT_EQ(cliffs_delta(b, a).d, -d.d);
  }
  EXPECT_EQ(cliffs_magnitude(0.1), EffectMagnitude::negligible);
  EXPECT_EQ(cliffs_magnitude(0.147), EffectMagnitude::small);
  EXPECT_EQ(cliffs_magnitude(-0.33), EffectMagnitude::medium);
  EXPECT_EQ(cliffs_magnitude(0.474), EffectMagnitude::large);
  const std::vector<double> lo{1, 2}, hi{3, 4};
  EXPECT_EQ(cliffs_delta(hi, lo).d, 1.0);
  EXPECT_EQ(cliffs_delta(hi, lo).magnitude, EffectMagnitude::large);
}

TEST(Cooccurrence, Counts) {
  const auto y = lm(3, 2, {1, 1, 1, 1, 1, 0});
  const auto c = cooccurrence(y);
  EXPECT_EQ(c(0, 0), 3u);
  EXPECT_EQ(c(1, 1), 2u);
  EXPECT_EQ(c(0, 1), 2u);
  EXPECT_EQ(c(1, 0), 2u);
  Rng rng(4);
  LabelMatrix r(30, 6);
  for (auto& v : r.data()) v = (rng.uniform01() < 0.3);
  const auto m = cooccurrence(r);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_EQ(m(i, j), m(j, i));
      EXPECT_LE(m(i, j), std::min(m(i, i), m(j, j)));
    }
  EXPECT_EQ(cooccurrence_csv(c, {"A", "B"}), "label,A,B\nA,3,2\nB,2,2\n");
}

TEST(Report, JsonRoundTripAndFormat) {
  const auto truth = lm(4, 2, {1, 0, 1, 1, 0, 0, 0, 1});
  const auto pred = lm(4, 2, {1, 1, 0, 1, 0, 0, 1, 0});
  RunMetadata meta;
  meta.mode = "per_project";
  meta.project = "demo";
  meta.algorithm = "forest";
  meta.seed = 7;
  meta.split_index = 2;
  const auto r = EvalReport::build(truth, pred, {"UI", "DB"}, meta);
  const nlohmann::json j = r;
  EXPECT_EQ(j["schema_version"], 1);
  const auto back = j.get<EvalReport>();
  EXPECT_EQ(back.meta, r.meta);
  EXPECT_EQ(back.counts, r.counts);
  EXPECT_EQ(back.label_names, r.label_names);
  EXPECT_DOUBLE_EQ(back.micro.f, r.micro.f);
  EXPECT_DOUBLE_EQ(back.hamming, r.hamming);
  auto bad = j;
  bad["schema_version"] = 2;
  EXPECT_THROW(bad.get<EvalReport>(), SchemaError);

  const auto text = format_report(r);
  const auto header = text.find("TN");
  ASSERT_NE(header, std::string::npos);
  EXPECT_LT(header, text.find("FP"));
  EXPECT_LT(text.find("FP"), text.find("FN"));
  EXPECT_LT(text.find("FN"), text.find("TP"));
  EXPECT_NE(text.find("split 2"), std::string::npos);
}

TEST(Report, DegenerateLabelsFlaggedInJson) {
  const auto truth = lm(2, 1, {0, 0});
  const auto r = EvalReport::build(truth, truth, {"GIS"}, {});
  const nlohmann::json j = r;
  EXPECT_TRUE(j["labels"][0].contains("degenerate"));
  EXPECT_EQ(j["labels"][0]["degenerate"].size(), 3u);
}

TEST(Summary, MeanSdAndAggregation) {
  const auto s = summarize({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(s.mean, 2.5);
  EXPECT_NEAR(s.sd, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(s.min, 1);
  EXPECT_EQ(s.max, 4);
  EXPECT_EQ(summarize({7}).sd, 0.0);
  const auto truth = lm(2, 1, {1, 0});
  std::vector<EvalReport> rs{EvalReport::build(truth, truth, {"A"}, {}),
                             EvalReport::build(truth, lm(2, 1, {0, 1}), {"A"}, {})};
  const auto agg = aggregate_reports(rs);
  EXPECT_DOUBLE_EQ(agg["micro_f"]["mean"].get<double>(), 0.5);
  EXPECT_DOUBLE_EQ(agg["hamming_loss"]["max"].get<double>(), 1.0);
  EXPECT_EQ(agg["micro_f"]["n"], 2);
}

TEST(Compare, RunsCombineTestAndEffect) {
  const std::vector<double> a{0.8, 0.82, 0.85, 0.81, 0.83}, b{0.6, 0.62, 0.65, 0.61, 0.63};
  const auto c = compare_runs("micro_f", a, b);
  EXPECT_EQ(c.u, 25.0);
  EXPECT_LT(c.p, 0.05);
  EXPECT_EQ(c.cliff_delta, 1.0);
  EXPECT_EQ(c.magnitude, EffectMagnitude::large);
}
