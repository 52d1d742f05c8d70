#include <gtest/gtest.h>

#include "apidomain/codeparse/imports.hpp"
#include "apidomain/codeparse/snapshot.hpp"
#include "tempdir.hpp"

using namespace apidomain;

namespace {
std::vector<std::string> ns(std::string_view src, Language l) { return parse_import_namespaces(src, l); }
}  // namespace

TEST(Imports, JavaSingleImport) {
  EXPECT_EQ(ns("import java.util.List;", Language::java), (std::vector<std::string>{"java.util.List"}));
}

TEST(Imports, JavaStaticWildcardAndNoise) {
  const auto src =
      "package org.x;\n"
      "import static org.junit.Assert.assertEquals;\n"
      "import java.util.*;\n"
      "import  javax.swing . JFrame ;\n"
      "// import java.net.Socket;\n"
      "/* import java.sql.Connection; */\n"
      "class A { String s = \"import java.io.File;\"; }\n"
      "import java.util.List;\n";
  EXPECT_EQ(ns(src, Language::java),
            (std::vector<std::string>{"org.junit.Assert.assertEquals", "java.util", "javax.swing.JFrame",
                                      "java.util.List"}));
}

TEST(Imports, CSharpCommentExcluded) {
  EXPECT_EQ(ns("// using System.Net;\nusing System.IO;", Language::csharp), (std::vector<std::string>{"System.IO"}));
}

TEST(Imports, CSharpStaticAliasAndUsingStatement) {
  const auto src =
      "using static System.Math;\n"
      "using Json = Newtonsoft.Json;\n"
      "global using System.Linq;\n"
      "namespace A { class B { void C() { using (var f = Open()) {} using var g = Open(); } } }\n";
  EXPECT_EQ(ns(src, Language::csharp), (std::vector<std::string>{"System.Math", "Newtonsoft.Json", "System.Linq"}));
}

TEST(Imports, CppIncludesStripped) {
  EXPECT_EQ(ns("#include <vector>\n#include \"audio/mixer.h\"", Language::cpp),
            (std::vector<std::string>{"vector", "audio/mixer.h"}));
}

TEST(Imports, CppCommentedIncludeAndSpacing) {
  EXPECT_EQ(ns("//#include <map>\n  #  include <wx/frame.h>\n/*\n#include <set>\n*/\n", Language::cpp),
            (std::vector<std::string>{"wx/frame.h"}));
}

TEST(Imports, DuplicatesCollapsedAndLanguageNames) {
  EXPECT_EQ(ns("import a.B;\nimport a.B;\n", Language::java), (std::vector<std::string>{"a.B"}));
  EXPECT_EQ(parse_language("C#"), Language::csharp);
  EXPECT_EQ(parse_language("c++"), Language::cpp);
  EXPECT_THROW(parse_language("cobol"), UnsupportedLanguageError);
  const auto refs = parse_imports("import a.B;", "java", "src/X.java");
  ASSERT_EQ(refs.size(), 1u);
  EXPECT_EQ(refs[0].source_file, "src/X.java");
}

TEST(Snapshot, ThreeFilesFiveImports) {
  testutil::TempDir dir;
  text::write_file(dir / "src/A.java", "import java.util.List;\nimport java.util.Map;\n");
  text::write_file(dir / "src/b/B.java", "import java.sql.Connection;\nimport java.util.List;\n");
  text::write_file(dir / "C.java", "import javax.swing.JFrame;\nimport org.slf4j.Logger;\n");
  text::write_file(dir / "README.md", "import not.Code;\n");
  text::write_file(dir / ".git/x.java", "import hidden.Thing;\n");
  const auto snap = build_snapshot(dir.path(), Language::java);
  EXPECT_EQ(snap.index.file_paths, (std::set<std::string>{"C.java", "src/A.java", "src/b/B.java"}));
  EXPECT_EQ(snap.index.api_namespaces.size(), 5u);
  EXPECT_EQ(snap.unreadable, 0u);
  EXPECT_EQ(snap.file_apis.at("src/b/B.java").size(), 2u);
  EXPECT_EQ(detect_language(dir.path()), Language::java);
}

TEST(Snapshot, EmptyTreeAndMissingRoot) {
  testutil::TempDir dir;
  const auto snap = build_snapshot(dir.path(), Language::java);
  EXPECT_TRUE(snap.index.file_paths.empty());
  EXPECT_TRUE(snap.index.api_namespaces.empty());
  EXPECT_THROW(build_snapshot(dir / "nope", Language::java), UserError);
}

TEST(SnapshotFilter, DeletedOnlyDroppedMixedKept) {
  SnapshotIndex idx;
  idx.file_paths = {"src/Live.java"};
  ChangeSet deleted{"p", 1, "1", "", "", {"src/Gone.java"}, {}, true};
  ChangeSet mixed{"p", 2, "2", "", "", {"src/Gone.java", "src/Live.java"}, {}, true};
  const std::vector<IssueChangeLink> links{{"p", 10, 1}, {"p", 11, 2}};
  const auto kept = snapshot_filter(links, {deleted, mixed}, idx);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].issue, 11);
}

TEST(Snapshot, InventoryRoundTrip) {
  testutil::TempDir dir;
  text::write_file(dir / "src/A.java", "import java.util.List;\nimport \"odd\";\n");
  const auto snap = build_snapshot(dir.path(), Language::java);
  text::write_file(dir / "inv.csv", inventory_csv(snap.file_apis));
  EXPECT_EQ(read_inventory_csv(dir / "inv.csv"), snap.file_apis);
  const json j = snap.index;
  EXPECT_EQ(j.get<SnapshotIndex>(), snap.index);
}
