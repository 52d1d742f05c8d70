#include <gtest/gtest.h>

#include <cmath>

#include "apidomain/corpus/clean.hpp"
#include "apidomain/corpus/dataset.hpp"
#include "apidomain/corpus/documents.hpp"
#include "apidomain/corpus/mlsmote.hpp"
#include "apidomain/corpus/split.hpp"
#include "apidomain/corpus/stemmer.hpp"
#include "apidomain/corpus/stopwords.hpp"
#include "apidomain/corpus/tfidf.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace apidomain;

namespace {

LabelMatrix labels(std::size_t rows, std::size_t cols, std::vector<std::uint8_t> v) {
  return LabelMatrix(rows, cols, std::move(v));
}

MultiLabelDataset dataset_with_positives(const std::vector<std::size_t>& positives, std::size_t rows) {
  MultiLabelDataset ds;
  ds.features = FeatureMatrix(rows, 2);
  ds.labels = LabelMatrix(rows, positives.size(), 0);
  for (std::size_t r = 0; r < rows; ++r) {
    ds.features(r, 0) = static_cast<double>(r);
    ds.features(r, 1) = static_cast<double>(r % 7);
    ds.row_ids.push_back("p/" + std::to_string(r + 1));
  }
  for (std::size_t l = 0; l < positives.size(); ++l) {
    ds.label_names.push_back("L" + std::to_string(l));
    for (std::size_t r = 0; r < positives[l]; ++r) ds.labels(r, l) = 1;
  }
  return ds;
}

}  // namespace

// --- stemming and cleaning ----------------------------------------------------

TEST(Porter, ClassicVocabulary) {
  // reference stems from the published algorithm (NLTK, Martin extensions)
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"caresses", "caress"},   {"ponies", "poni"},         {"ties", "ti"},          {"cats", "cat"},
      {"agreed", "agre"},       {"plastered", "plaster"},   {"motoring", "motor"},   {"conflated", "conflat"},
      {"troubled", "troubl"},   {"sized", "size"},          {"hopping", "hop"},      {"falling", "fall"},
      {"filing", "file"},       {"happy", "happi"},         {"sky", "sky"},          {"relational", "relat"},
      {"conditional", "condit"}, {"digitizer", "digit"},    {"conformabli", "conform"},
      {"generalization", "gener"}, {"oscillators", "oscil"}, {"formative", "form"}, {"electriciti", "electr"},
      {"hopeful", "hope"},      {"goodness", "good"},       {"allowance", "allow"},  {"adjustable", "adjust"},
      {"replacement", "replac"}, {"adoption", "adopt"},     {"communism", "commun"}, {"angulariti", "angular"},
      {"effective", "effect"},  {"bowdlerize", "bowdler"},  {"probate", "probat"},   {"cease", "ceas"},
      {"controll", "control"},  {"generalizations", "gener"}, {"running", "run"},    {"tests", "test"},
      {"times", "time"}};
  for (const auto& [w, s] : pairs) EXPECT_EQ(porter_stem(w), s) << w;
}

TEST(Clean, RunningTestsExample) {
  EXPECT_EQ(clean_text("Running tests 42 times", CorpusLanguage::en), "run test time");
}

TEST(Clean, UrlAndPunctuationExample) {
  EXPECT_EQ(clean_text("Check https://a.b/c NOW!!", CorpusLanguage::en), "check");
  EXPECT_EQ(clean_text("", CorpusLanguage::en), "");
}

TEST(Clean, CodeSpansAndWwwRemoved) {
  EXPECT_EQ(clean_text("Crash in `parse()` see www.example.org/x\n```\nstack trace\n```\nafter", CorpusLanguage::en),
            "crash see");
}

TEST(Clean, Idempotent) {
  const std::vector<std::string> samples{
      "Running tests 42 times",    "The generalizations of conditional relational databases",
      "Hopping, falling; FILING!", "Ação de configuração não funciona",
      "ponies ties caresses",      "Ünïcode wörds and ß letters"};
  for (const auto& s : samples) {
    for (auto lang : {CorpusLanguage::en, CorpusLanguage::pt}) {
      const auto once = clean_text(s, lang);
      EXPECT_EQ(clean_text(once, lang), once) << s;
    }
  }
}

TEST(Clean, CustomStopwordsAndLoading) {
  testutil::TempDir dir;
  text::write_file(dir / "stop.txt", "# custom\nfoo\nBAR\n");
  const auto stop = load_stopwords(dir / "stop.txt");
  EXPECT_EQ(clean_text("foo bar baz", CorpusLanguage::en, stop), "baz");
  EXPECT_TRUE(default_stopwords(CorpusLanguage::en).count("the"));
  EXPECT_TRUE(default_stopwords(CorpusLanguage::pt).count("de"));
}

TEST(Templates, LineRemovalRules) {
  const std::vector<std::string> tpl{"Steps to reproduce", "Expected behavior"};
  EXPECT_EQ(remove_templates("Crash\nSteps to reproduce\nclick", tpl), "Crash\nclick");
  EXPECT_EQ(remove_templates("Nothing to strip\nhere", tpl), "Nothing to strip\nhere");
  EXPECT_EQ(remove_templates("steps to reproduce \nA\n  Steps to Reproduce\nB", tpl), "A\nB");
}

TEST(Documents, FieldSelectionAndComposedIds) {
  Issue i;
  i.project_id = "jabref";
  i.number = 12;
  i.title = "Export fails";
  i.body = "Export fails";
  i.comments = {"works on linux"};
  EXPECT_EQ(select_fields(i, CorpusFields::title_body), "Export fails");  // duplicate segment once
  EXPECT_EQ(select_fields(i, CorpusFields::title_body_comments), "Export fails\nworks on linux");
  const auto d = make_document(i, {CorpusFields::body, CorpusLanguage::en, {}, nullptr});
  EXPECT_EQ(d.row_id, "jabref/12");
  EXPECT_EQ(d.text, "export fail");
  EXPECT_EQ(parse_corpus_fields("t + b + c"), CorpusFields::title_body_comments);
  EXPECT_THROW(parse_corpus_fields("X"), ConfigError);
  const nlohmann::json j = d;
  EXPECT_EQ(j.get<Document>().text, d.text);
}

// --- TF-IDF ------------------------------------------------------------------

TEST(Tfidf, TermInEveryDocHasIdfOne) {
  const auto m = TfidfModel::fit({"a b", "a c", "a"}, {1, 1});
  EXPECT_DOUBLE_EQ(m.idf()[*m.column("a")], 1.0);
  EXPECT_DOUBLE_EQ(m.idf()[*m.column("b")], std::log(4.0 / 2.0) + 1.0);
}

TEST(Tfidf, SingleDocumentHandExample) {
  const auto m = TfidfModel::fit({"a a b"}, {1, 1});
  const auto row = m.transform_one("a a b");
  EXPECT_NEAR(row[*m.column("a")], 2.0 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(row[*m.column("b")], 1.0 / std::sqrt(5.0), 1e-15);
}

TEST(Tfidf, NgramVocabularies) {
  const auto uni = TfidfModel::fit({"a b c"}, {1, 1});
  const auto bi = TfidfModel::fit({"a b c"}, {2, 2});
  EXPECT_EQ(uni.terms(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(bi.terms(), (std::vector<std::string>{"a b", "b c"}));
  EXPECT_EQ(parse_ngram_range("1-2"), (NgramRange{1, 2}));
  EXPECT_THROW(parse_ngram_range("3-1"), ParameterError);
  EXPECT_THROW(parse_ngram_range("x"), ConfigError);
}

TEST(Tfidf, RowsUnitNormOrZeroAndFrozenVocabulary) {
  const auto data = synth::indicator_corpus(50, 4, 3);
  const auto m = TfidfModel::fit(data.docs, {1, 2});
  const auto X = m.transform(data.docs, 2);
  for (std::size_t r = 0; r < X.rows(); ++r) {
    double s = 0;
    for (double v : X.row(r)) s += v * v;
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
  const auto unseen = m.transform_one("entirely novel words");
  for (double v : unseen) EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(m.column("novel"));
  EXPECT_THROW(TfidfModel{}.transform_one("a"), StateError);
  EXPECT_THROW(TfidfModel::fit({}, {1, 1}), DataError);
}

TEST(Tfidf, JsonRoundTripPreservesTransform) {
  const auto m = TfidfModel::fit({"a b", "b c d", "d d"}, {1, 2}, {"jabref"});
  const nlohmann::json j = m;
  const auto back = j.get<TfidfModel>();
  EXPECT_EQ(back.terms(), m.terms());
  EXPECT_EQ(back.sources(), std::set<std::string>{"jabref"});
  EXPECT_EQ(back.transform_one("b c d d"), m.transform_one("b c d d"));
}

// --- datasets ----------------------------------------------------------------

TEST(Diagnostics, HandMatrixAndAllOnes) {
  const auto d = diagnostics(labels(2, 3, {1, 1, 0, 1, 0, 0}));
  EXPECT_EQ(d.cardinality, 1.5);
  EXPECT_EQ(d.density, 0.5);
  EXPECT_EQ(diagnostics(LabelMatrix(4, 5, 1)).density, 1.0);
  EXPECT_THROW(diagnostics(LabelMatrix(0, 3)), DataError);
}

TEST(FilterLabels, OverThresholdAndAbsentDropped) {
  auto ds = dataset_with_positives({95, 50, 0}, 100);
  const auto f = filter_labels(ds, 0.9);
  EXPECT_EQ(f.dataset.label_names, (std::vector<std::string>{"L1"}));
  ASSERT_EQ(f.dropped.size(), 2u);
  EXPECT_EQ(f.dropped[0].reason, DropReason::over_threshold);
  EXPECT_EQ(f.dropped[1].reason, DropReason::absent);
  // fixpoint
  EXPECT_EQ(filter_labels(f.dataset, 0.9).dataset, f.dataset);
  EXPECT_THROW(filter_labels(dataset_with_positives({0}, 10)), EmptyLabelError);
  EXPECT_THROW(filter_labels(ds, 0.0), ParameterError);
}

TEST(Dataset, AlignZeroFillsAndReorders) {
  auto ds = dataset_with_positives({3, 5}, 10);
  const auto a = align_labels(ds, {"L1", "X", "L0"});
  EXPECT_EQ(a.label_names, (std::vector<std::string>{"L1", "X", "L0"}));
  EXPECT_EQ(label_positives(a.labels), (std::vector<std::size_t>{5, 0, 3}));
}

TEST(Dataset, SaveLoadRoundTripAndIntegrity) {
  testutil::TempDir dir;
  auto ds = dataset_with_positives({3, 5}, 10);
  ds.features(2, 1) = 0.1234567890123;
  save_dataset(dir / "ds", ds, {{"project", "p"}});
  EXPECT_EQ(load_dataset(dir / "ds"), ds);
  EXPECT_EQ(read_json(dir / "ds/provenance.json").at("project"), "p");
  ds.row_ids[1] = ds.row_ids[0];
  EXPECT_THROW(ds.validate(), IntegrityError);
  std::filesystem::resize_file(dir / "ds/features.bin", 8);
  EXPECT_THROW(load_dataset(dir / "ds"), SchemaError);
}

// --- splitting ---------------------------------------------------------------

TEST(Split, TestSizeRoundsUp) { EXPECT_EQ(test_size_for(1648, 0.2), 330u); }

TEST(Split, TenSplitsOfHundredAndDeterminism) {
  const auto a = shuffle_split(100, 0.3, 10, 5);
  ASSERT_EQ(a.splits.size(), 10u);
  for (const auto& s : a.splits) {
    EXPECT_EQ(s.test.size(), 30u);
    EXPECT_EQ(s.train.size(), 70u);
    std::vector<std::size_t> all(s.train);
    all.insert(all.end(), s.test.begin(), s.test.end());
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(all[i], i);
  }
  EXPECT_EQ(shuffle_split(100, 0.3, 10, 5), a);
  EXPECT_FALSE(shuffle_split(100, 0.3, 10, 6) == a);
  EXPECT_FALSE(a.splits[0] == a.splits[1]);
  EXPECT_THROW(shuffle_split(9, 0.3, 1, 1), DatasetTooSmallError);
  EXPECT_THROW(shuffle_split(100, 1.0, 1, 1), ParameterError);
}

// --- MLSMOTE -----------------------------------------------------------------

TEST(Mlsmote, HandArithmeticHundredAndTen) {
  const auto ds = dataset_with_positives({100, 10}, 120);
  const auto ir = irlbl(ds.labels);
  EXPECT_EQ(ir[0], 1.0);
  EXPECT_EQ(ir[1], 10.0);
  EXPECT_EQ(mean_ir(ds.labels), 5.5);
  MlsmoteReport rep;
  const auto out = mlsmote(ds, 3, 1, &rep);
  EXPECT_EQ(rep.minority_labels, (std::vector<std::string>{"L1"}));
  EXPECT_EQ(rep.synthesized, 10u);
  EXPECT_EQ(out.rows(), 130u);
  for (std::size_t r = 120; r < 130; ++r) EXPECT_TRUE(out.is_synthetic(r));
}

TEST(Mlsmote, BalancedIsFixpoint) {
  const auto ds = dataset_with_positives({6, 6, 6}, 12);
  const auto out = mlsmote(ds, 3, 9);
  EXPECT_EQ(out.rows(), ds.rows());
  EXPECT_EQ(out.features, ds.features);
  EXPECT_EQ(out.labels, ds.labels);
}

TEST(Mlsmote, SinglePositiveMinoritySkipped) {
  const auto ds = dataset_with_positives({20, 1}, 30);
  MlsmoteReport rep;
  const auto out = mlsmote(ds, 3, 9, &rep);
  EXPECT_EQ(rep.skipped_labels, (std::vector<std::string>{"L1"}));
  EXPECT_EQ(out.rows(), 30u);
  EXPECT_THROW(mlsmote(ds, 30, 1), ParameterError);
}

// Positives A10 B2 C1 D9 E9: MeanIR 3.6444, only B is a minority label that
// can be oversampled. Its two seeds carry A, D and E too, so each candidate
// row is {A,B,D,E}. The first gives MeanIR 3.5727 (kept); the second would
// give 3.6364 and is dropped.
TEST(Mlsmote, CandidateRaisingMeanIrIsDropped) {
  MultiLabelDataset ds;
  ds.label_names = {"A", "B", "C", "D", "E"};
  ds.features = FeatureMatrix(10, 1);
  ds.labels = LabelMatrix(10, 5, 0);
  for (std::size_t r = 0; r < 10; ++r) {
    ds.features(r, 0) = static_cast<double>(r);
    ds.row_ids.push_back("r" + std::to_string(r));
    ds.labels(r, 0) = 1;
    if (r < 2) ds.labels(r, 1) = 1;
    if (r < 9) ds.labels(r, 3) = ds.labels(r, 4) = 1;
  }
  ds.labels(9, 2) = 1;
  EXPECT_NEAR(mean_ir(ds.labels), (1.0 + 5.0 + 10.0 + 10.0 / 9 + 10.0 / 9) / 5, 1e-12);
  MlsmoteReport rep;
  const auto out = mlsmote(ds, 1, 3, &rep);
  EXPECT_EQ(rep.minority_labels, (std::vector<std::string>{"B", "C"}));
  EXPECT_EQ(rep.skipped_labels, (std::vector<std::string>{"C"}));
  EXPECT_EQ(rep.synthesized, 1u);
  EXPECT_EQ(rep.rejected, 1u);
  ASSERT_EQ(out.rows(), 11u);
  EXPECT_EQ(out.labels.row(10)[0] + out.labels.row(10)[1] + out.labels.row(10)[3] + out.labels.row(10)[4], 4);
  EXPECT_EQ(out.labels(10, 2), 0);
  EXPECT_NEAR(mean_ir(out.labels), (1.0 + 11.0 / 3 + 11.0 + 1.1 + 1.1) / 5, 1e-12);
}

TEST(Mlsmote, InterpolatedFeaturesStayBetweenSeedAndNeighbour) {
  Rng rng(77);
  const auto ds = synth::imbalanced(rng);
  const auto out = mlsmote(ds, 3, 4);
  for (std::size_t r = ds.rows(); r < out.rows(); ++r)
    for (std::size_t c = 0; c < ds.features.cols(); ++c) {
      EXPECT_GE(out.features(r, c), 0.0);
      EXPECT_LE(out.features(r, c), 1.0);
    }
  EXPECT_EQ(mlsmote(ds, 3, 4), out);
}
