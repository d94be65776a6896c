#include <gtest/gtest.h>

#include <json.hpp>

#include "cellrw/driver/driver.hpp"
#include "cellrw/library/builtin.hpp"
#include "support.hpp"

using namespace cellrw;
using namespace cellrw::driver;
using namespace cellrw::testing;

namespace {

const rules::Registry& registry() {
  static const rules::Registry reg = library::builtin_rules();
  return reg;
}

constexpr const char* kDef =
    "def weighted_rating(x, m=m, C=C):\n"
    "  v = x['vote_count']\n"
    "  R = x['vote_average']\n"
    "  return (v/(v+m) * R) + (m/(m+v) * C)\n";

}  // namespace

TEST(RewriteCell, PassThroughIsByteIdentical) {
  std::string code = "print('hi')   # keep   this\n\n\nx=[1,2 ,3]\n";
  auto r = rewrite_cell(code, {}, registry());
  EXPECT_EQ(r.text, code);
  EXPECT_EQ(r.report.outcome, Outcome::PassThrough);
  EXPECT_EQ(r.report.bytes_in, r.report.bytes_out);
}

TEST(RewriteCell, ParseFailureIsReportedNotRaised) {
  std::string code = "%time df['A'].sort_values().head(n=5)\n";
  auto r = rewrite_cell(code, {}, registry());
  EXPECT_EQ(r.text, code);
  EXPECT_EQ(r.report.outcome, Outcome::ParseFailure);
  ASSERT_EQ(r.report.skipped.size(), 1u);
}

TEST(RewriteCell, OnlyTheMatchedStatementChanges) {
  std::string code =
      "# setup\n"
      "import pandas as pd   # spaced\n"
      "top = df['A'].sort_values().head(n=5)  # trailing\n"
      "print( top )\n";
  auto r = rewrite_cell(code, {}, registry());
  ASSERT_EQ(r.report.outcome, Outcome::Rewritten);
  EXPECT_EQ(r.text.rfind("# setup\nimport pandas as pd   # spaced\n__cellrw_called_on = df['A']\n", 0), 0u);
  EXPECT_NE(r.text.find("    top = __cellrw_called_on.sort_values().head(n=5)  # trailing\nprint( top )\n"),
            std::string::npos);
  ASSERT_EQ(r.report.matches.size(), 1u);
  EXPECT_EQ(r.report.matches[0].first_line, 3);
  EXPECT_EQ(r.report.matches[0].last_line, 3);
}

TEST(RewriteCell, NestedStatementsKeepIndentation) {
  std::string code =
      "for s in items:\n"
      "    if s is not None:\n"
      "        out.append(s.sort_values().head(n=3))\n";
  auto r = rewrite_cell(code, {}, registry());
  ASSERT_EQ(r.report.outcome, Outcome::Rewritten);
  EXPECT_NE(r.text.find("\n        try:\n            import pandas as __cellrw_pd\n"), std::string::npos);
  EXPECT_NE(r.text.find("\n        if __cellrw_ok:\n            out.append(s.nsmallest(n=3))\n"), std::string::npos);
}

TEST(RewriteCell, CrlfCellsStayCrlf) {
  std::string code = "x = 1\r\ny = s.sort_values().head(n=5)\r\nz = 2\r\n";
  auto r = rewrite_cell(code, {}, registry());
  ASSERT_EQ(r.report.outcome, Outcome::Rewritten);
  for (std::size_t i = 0; i < r.text.size(); ++i)
    if (r.text[i] == '\n') ASSERT_TRUE(i > 0 && r.text[i - 1] == '\r') << "bare LF at " << i;
}

TEST(RewriteCell, DisplayedValueOnlyForTheLastStatement) {
  auto last = rewrite_cell("x = 1\ns.sort_values().head(n=3)\n", {}, registry());
  EXPECT_NE(last.text.find("__cellrw_res = s.nsmallest(n=3)"), std::string::npos);
  EXPECT_TRUE(last.text.ends_with("\n__cellrw_res\n"));
  auto middle = rewrite_cell("s.sort_values().head(n=3)\nx = 1\n", {}, registry());
  ASSERT_EQ(middle.report.outcome, Outcome::Rewritten);
  EXPECT_EQ(middle.text.find("__cellrw_res"), std::string::npos);
  EXPECT_NE(middle.text.find("    s.nsmallest(n=3)\nelse:\n    s.sort_values().head(n=3)\n"), std::string::npos);
}

TEST(RewriteCell, MultilineStatement) {
  std::string code = "y = (df['A']\n     .sort_values()\n     .head(n=5))\nz = 1\n";
  auto r = rewrite_cell(code, {}, registry());
  ASSERT_EQ(r.report.matches.size(), 1u);
  EXPECT_EQ(r.report.matches[0].first_line, 1);
  EXPECT_EQ(r.report.matches[0].last_line, 3);
  EXPECT_NE(r.text.find("\nz = 1\n"), std::string::npos);
}

TEST(RewriteCell, ExistingGeneratedNamesAreAvoided) {
  History h;
  h.append("__cellrw_ok = 'user value'\n");
  std::string code = "__cellrw_called_on = 1\ny = s.sort_values().head(n=5)\n";
  auto r = rewrite_cell(code, h, registry());
  ASSERT_EQ(r.report.outcome, Outcome::Rewritten);
  EXPECT_NE(r.text.find("__cellrw_ok_1 = "), std::string::npos);
  EXPECT_EQ(r.text.find("__cellrw_ok = "), std::string::npos);
}

TEST(RewriteCell, IdempotentAndDeterministic) {
  for (const auto& name : fixture_names()) {
    auto input = read_text(data_path("fixtures/" + name + ".py"));
    auto a = rewrite_cell(input, {}, registry());
    auto b = rewrite_cell(input, {}, registry());
    EXPECT_EQ(a.text, b.text) << name;
    EXPECT_EQ(report_json(a.report, false), report_json(b.report, false)) << name;
    auto again = rewrite_cell(a.text, {}, registry());
    EXPECT_EQ(again.text, a.text) << name;
    EXPECT_EQ(again.report.outcome, Outcome::PassThrough) << name;
  }
}

TEST(History, ChunksAndResolution) {
  auto h = History::from_text(std::string("# %%\nimport pandas as pd\n# %%\n") + kDef + "# %%\nprint(1)\n");
  EXPECT_EQ(h.size(), 3u);
  const auto* def = h.find_function("weighted_rating");
  ASSERT_NE(def, nullptr);
  EXPECT_EQ(def->text, "weighted_rating");
  EXPECT_EQ(h.find_function("missing"), nullptr);
  EXPECT_TRUE(h.binds("pd"));
}

TEST(History, LatestBindingWins) {
  History h;
  h.append(kDef);
  h.append("weighted_rating = None\n");
  EXPECT_EQ(h.find_function("weighted_rating"), nullptr);
  h.append(kDef);
  EXPECT_NE(h.find_function("weighted_rating"), nullptr);
  h.append("from helpers import *\n");
  EXPECT_EQ(h.find_function("weighted_rating"), nullptr);
}

TEST(History, MagicLinesDoNotHideDefinitions) {
  History h;
  h.append(std::string("%matplotlib inline\n!ls\n") + kDef);
  EXPECT_NE(h.find_function("weighted_rating"), nullptr);
}

TEST(History, UnparsableChunksAreSkipped) {
  History h;
  h.append(kDef);
  h.append("weighted_rating = (\n");
  EXPECT_NE(h.find_function("weighted_rating"), nullptr);
}

TEST(RewriteCell, DeferredRuleUsesHistory) {
  History h;
  h.append(kDef);
  auto r = rewrite_cell("scores = df.apply(weighted_rating, axis=1)\n", h, registry());
  ASSERT_EQ(r.report.matches.size(), 1u);
  EXPECT_EQ(r.report.matches[0].rule, "apply-direct");
  auto none = rewrite_cell("scores = df.apply(weighted_rating, axis=1)\n", {}, registry());
  EXPECT_EQ(none.report.outcome, Outcome::PassThrough);
}

TEST(RewriteCell, CellDefinitionShadowsHistory) {
  History h;
  h.append(kDef);
  auto r = rewrite_cell("weighted_rating = len\nscores = df.apply(weighted_rating, axis=1)\n", h, registry());
  EXPECT_EQ(r.report.outcome, Outcome::PassThrough);
}

TEST(Report, JsonShape) {
  auto r = rewrite_cell(read_text(data_path("fixtures/sort_head.py")), {}, registry());
  auto j = nlohmann::json::parse(report_json(r.report));
  EXPECT_EQ(j["cell_id"], "cell");
  EXPECT_EQ(j["outcome"], "rewritten");
  EXPECT_EQ(j["matches"][0]["rule"], "nsmallest");
  EXPECT_EQ(j["matches"][0]["span"], nlohmann::json::array({1, 1}));
  for (const char* k : {"parse", "match", "codegen", "total"}) EXPECT_TRUE(j["timings_us"][k].is_number_integer()) << k;
  EXPECT_EQ(j["bytes_in"], r.report.bytes_in);
  EXPECT_EQ(j["bytes_out"], r.text.size());
  EXPECT_FALSE(nlohmann::json::parse(report_json(r.report, false)).contains("timings_us"));
}

TEST(Notebook, UntouchedDocumentIsByteIdentical) {
  std::string doc = "{\n \"cells\": [\n  {\"cell_type\": \"code\", \"source\": [\"print('hi')\"], \"id\": \"x\"},\n"
                    "  {\"cell_type\": \"markdown\", \"source\": \"df['A'].sort_values().head(n=5)\"}\n ],\n"
                    " \"metadata\": {\"k\": [1, 2.50, true, null]}, \"nbformat\": 4, \"nbformat_minor\": 5\n}";
  auto r = rewrite_notebook(doc, {}, registry());
  EXPECT_FALSE(r.changed);
  EXPECT_EQ(r.text, doc);
  ASSERT_EQ(r.reports.size(), 1u);
  EXPECT_EQ(r.reports[0].cell_id, "x");
}

TEST(Notebook, OnlyRewrittenSourcesChange) {
  auto doc = read_text(data_path("fixtures/history.ipynb"));
  auto r = rewrite_notebook(doc, {}, registry());
  ASSERT_TRUE(r.changed);
  auto before = nlohmann::json::parse(doc);
  auto after = nlohmann::json::parse(r.text);
  ASSERT_EQ(before["cells"].size(), after["cells"].size());
  int changed = 0;
  for (std::size_t i = 0; i < before["cells"].size(); ++i) {
    auto b = before["cells"][i], a = after["cells"][i];
    if (a["source"] != b["source"]) {
      ++changed;
      EXPECT_EQ(a["id"], "c6");
    }
    a.erase("source");
    b.erase("source");
    EXPECT_EQ(a, b);
  }
  EXPECT_EQ(changed, 1);
  EXPECT_EQ(before["metadata"], after["metadata"]);
  std::vector<std::string> outcomes;
  for (const auto& rep : r.reports) outcomes.emplace_back(outcome_name(rep.outcome));
  EXPECT_EQ(outcomes, (std::vector<std::string>{"parse-failure", "pass-through", "pass-through", "pass-through",
                                                "pass-through", "rewritten"}));
  // nbformat layout: one string per line, one item per line.
  EXPECT_NE(r.text.find("    \"if __cellrw_ok:\\n\",\n    \"    scores = weighted_rating(df)\\n\",\n"), std::string::npos);
}

TEST(Notebook, StringAndCompactSources) {
  std::string doc = "{\"cells\": [{\"cell_type\": \"code\", \"source\": \"y = s.sort_values().head(n=5)\"},"
                    " {\"cell_type\": \"code\", \"source\": [\"z = s.sort_values().head(n=5)\"]}]}";
  auto r = rewrite_notebook(doc, {}, registry());
  ASSERT_TRUE(r.changed);
  auto j = nlohmann::json::parse(r.text);
  EXPECT_TRUE(j["cells"][0]["source"].is_string());
  EXPECT_TRUE(j["cells"][1]["source"].is_array());
  EXPECT_EQ(r.text.find('\n'), std::string::npos);
  EXPECT_EQ(r.reports[1].cell_id, "cell-1");
}

TEST(Notebook, MalformedDocuments) {
  for (const char* doc : {"", "[]", "{\"cells\": 3}", "{\"cells\": [{\"cell_type\": 1}]}", "{\"cells\": [",
                          "{\"metadata\": {}}", "{\"cells\": [{\"cell_type\": \"code\", \"source\": [1]}]}"}) {
    EXPECT_THROW(rewrite_notebook(doc, {}, registry()), NotebookError) << doc;
  }
}

TEST(Diff, UnifiedFormat) {
  EXPECT_EQ(unified_diff("a\nb\nc\n", "a\nb\nc\n"), "");
  EXPECT_EQ(unified_diff("a\nb\nc\n", "a\nB\nc\n"), "--- original\n+++ rewritten\n@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n");
  EXPECT_EQ(unified_diff("", "x\n"), "--- original\n+++ rewritten\n@@ -0,0 +1,1 @@\n+x\n");
}

TEST(Explain, DiffAndMatchTable) {
  auto out = explain(read_text(data_path("fixtures/sort_head.py")), {}, registry());
  EXPECT_NE(out.find("-df['A'].sort_values().head(n=5)\n"), std::string::npos);
  EXPECT_NE(out.find("nsmallest         1-1      isinstance(__cellrw_called_on, __cellrw_pd.Series)"), std::string::npos);
  auto none = explain("print('hi')\n", {}, registry());
  EXPECT_NE(none.find("no changes (pass-through)"), std::string::npos);
  auto magic = explain("%who\n", {}, registry());
  EXPECT_NE(magic.find("skipped: parse failure"), std::string::npos);
}
