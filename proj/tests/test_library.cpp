#include <gtest/gtest.h>

#include "cellrw/driver/driver.hpp"
#include "cellrw/library/builtin.hpp"
#include "support.hpp"

using namespace cellrw;
using namespace cellrw::testing;

TEST(Library, IdsAndOrder) {
  auto reg = library::builtin_rules();
  ASSERT_EQ(reg.size(), library::kRuleIds.size());
  for (std::size_t i = 0; i < reg.size(); ++i) EXPECT_EQ(reg[i].id, library::kRuleIds[i]);
  EXPECT_EQ(reg.find("apply-direct")->kind, rules::RuleKind::Deferred);
  EXPECT_EQ(reg.find("apply-select")->kind, rules::RuleKind::Deferred);
  EXPECT_EQ(reg.find("nsmallest")->kind, rules::RuleKind::Guarded);
}

class Golden : public ::testing::TestWithParam<std::string> {};

TEST_P(Golden, MatchesStoredRewrite) {
  auto reg = library::builtin_rules();
  auto input = read_text(data_path("fixtures/" + GetParam() + ".py"));
  auto golden = read_text(data_path("goldens/" + GetParam() + ".py"));
  auto r = driver::rewrite_cell(input, {}, reg);
  EXPECT_EQ(r.report.outcome, driver::Outcome::Rewritten);
  EXPECT_EQ(canonicalize_temps(r.text), canonicalize_temps(golden));
}

TEST_P(Golden, GuardedBranchEqualsExpectedRewrite) {
  auto golden = read_text(data_path("goldens/" + GetParam() + ".py"));
  auto expected = read_text(data_path("expected_rhs/" + GetParam() + ".py"));
  EXPECT_EQ(canonical(strip_guard(golden)), canonical(expected));
}

INSTANTIATE_TEST_SUITE_P(Fixtures, Golden, ::testing::ValuesIn(fixture_names()),
                         [](const auto& info) { return info.param; });

namespace {

std::string rewrite(std::string_view code) { return driver::rewrite_cell(code, {}, library::builtin_rules()).text; }

bool rewritten(std::string_view code) { return rewrite(code) != code; }

}  // namespace

TEST(Library, ConcatForms) {
  EXPECT_TRUE(rewritten("s = pandas.Series(a.tolist() + b.tolist())\n"));
  EXPECT_TRUE(rewritten("s = Series(a.tolist() + b.tolist())\n"));
  EXPECT_FALSE(rewritten("s = pd.Series(a.tolist() + b)\n"));
  EXPECT_FALSE(rewritten("s = pd.Series(a.tolist() + b.tolist(), name='x')\n"));
  auto out = rewrite("s = Series(a.tolist() + b.tolist())\n");
  EXPECT_NE(out.find("Series is __cellrw_pd.Series"), std::string::npos);
}

TEST(Library, SplitTargetsMustDiffer) {
  EXPECT_FALSE(rewritten("a, a = s.str.split('(', 1, expand=True)\n"));
  EXPECT_FALSE(rewritten("df[['x', 'x']] = s.str.split('(', n=1, expand=True)\n"));
  EXPECT_FALSE(rewritten("obj.df[['x', 'y']] = s.str.split('(', n=1, expand=True)\n"));
}

TEST(Library, SubstringNeedleMustBeConstantString) {
  EXPECT_TRUE(rewritten("m = s.apply(lambda t: 'x' in t)\n"));
  EXPECT_FALSE(rewritten("m = s.apply(lambda t: needle in t)\n"));
  EXPECT_FALSE(rewritten("m = s.apply(lambda t: 1 in t)\n"));
  EXPECT_FALSE(rewritten("m = s.apply(lambda t, u=1: 'x' in t)\n"));
}

TEST(Library, DeferredRulesUseTheLatestDefinition) {
  std::string code =
      "def f(r):\n"
      "    return r['a'] * 2\n"
      "def f(r):\n"
      "    if r['a'] > 0:\n"
      "        return 'p'\n"
      "    else:\n"
      "        return 'n'\n"
      "out = df.apply(f, axis=1)\n";
  auto r = driver::rewrite_cell(code, {}, library::builtin_rules());
  ASSERT_EQ(r.report.matches.size(), 1u);
  EXPECT_EQ(r.report.matches[0].rule, "apply-select");
}

TEST(Library, DeferredRulesGiveUpOnRebinding) {
  std::string code =
      "def f(r):\n"
      "    return r['a'] * 2\n"
      "f = other\n"
      "out = df.apply(f, axis=1)\n";
  EXPECT_FALSE(rewritten(code));
}

TEST(Library, ApplySelectGuardsContainersAndStringColumns) {
  auto out = rewrite(read_text(data_path("fixtures/apply_select.py")));
  EXPECT_NE(out.find("isinstance(ls, (list, tuple, set, frozenset))"), std::string::npos);
  EXPECT_NE(out.find("infer_dtype(df['A'], skipna=False) == 'string'"), std::string::npos);
  EXPECT_NE(out.find("__cellrw_inspect.getsource(foo)"), std::string::npos);
}

TEST(Library, SplitGuards) {
  auto out = rewrite("df[['l', 'r']] = df['C'].str.split('(', n=1, expand=True)\n");
  EXPECT_NE(out.find("isinstance(df, __cellrw_pd.DataFrame) and isinstance(__cellrw_ser, __cellrw_pd.Series)"),
            std::string::npos);
  EXPECT_NE(out.find("__cellrw_ser.str.contains('(', regex=False).any()"), std::string::npos);
}

TEST(Library, SplitMayOverwriteItsSourceColumn) {
  auto out = rewrite("df[['C', 'r']] = df['C'].str.split('(', n=1, expand=True)\n");
  EXPECT_NE(out.find("__cellrw_ser = df['C']\n"), std::string::npos);
  EXPECT_NE(out.find("df['C'] = __cellrw_pd.Series(__cellrw_a, __cellrw_ser.index)\n"), std::string::npos);
  EXPECT_NE(out.find("df['r'] = __cellrw_pd.Series(__cellrw_b, __cellrw_ser.index)\n"), std::string::npos);
}

TEST(Library, ApplyDirectDropsTheSeriesName) {
  auto call = "out = df.apply(f, axis=1)\n";
  auto two = rewrite("def f(x):\n    return x['a'] * x['b']\n" + std::string(call));
  EXPECT_NE(two.find("out = f(df)\n"), std::string::npos);
  // One column, or one column and scalars, keeps that column's name.
  for (const char* body : {"    return x['a'] * 2\n", "    v = x['b']\n    return x['a'] - x['a']\n"}) {
    auto one = rewrite("def f(x):\n" + std::string(body) + call);
    EXPECT_NE(one.find("out = f(df).rename(None)\n"), std::string::npos) << one;
  }
}

TEST(Library, ApplyDirectArithmeticGuards) {
  auto call = "out = df.apply(f, axis=1)\n";
  auto div = rewrite("def f(x, m=1):\n    return x['a'] / (x['b'] + m)\n" + std::string(call));
  auto integrity = div.find("__cellrw_inspect");
  auto nonzero = div.find("__cellrw_np.all(df['b'] + f.__defaults__[0] != 0)");
  ASSERT_NE(integrity, std::string::npos);
  ASSERT_NE(nonzero, std::string::npos);
  EXPECT_LT(integrity, nonzero);
  EXPECT_EQ(div.find(".kind in 'iuf' for"), std::string::npos);

  auto literal = rewrite("def f(x):\n    return x['a'] / 2 + x['b']\n" + std::string(call));
  EXPECT_EQ(literal.find("!= 0)"), std::string::npos);

  auto power = rewrite("def f(x):\n    return x['a'] ** 2 + x['b']\n" + std::string(call));
  EXPECT_NE(power.find("__cellrw_dt.kind in 'iuf' for __cellrw_dt in df.dtypes"), std::string::npos);
}
