#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support.hpp"

using namespace cellrw::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI through the shell; stderr goes to `err_file` when given.
Run run(const std::string& args, const std::string& stdin_text = {}, const std::string& err_file = "/dev/null") {
  auto in = fs::temp_directory_path() /
            ("cellrw_stdin_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + ".txt");
  std::ofstream(in, std::ios::binary) << stdin_text;
  std::string cmd = std::string(CELLRW_BIN) + " " + args + " < " + in.string() + " 2> " + err_file;
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path temp_file(const std::string& name, const std::string& content) {
  auto p = fs::temp_directory_path() / name;
  std::ofstream(p, std::ios::binary) << content;
  return p;
}

}  // namespace

TEST(Cli, ListRules) {
  auto r = run("list-rules");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("nsmallest\tguarded\t", 0), 0u);
  EXPECT_NE(r.out.find("apply-select\tdeferred\t"), std::string::npos);
}

TEST(Cli, StdinRoundTrip) {
  auto r = run("rewrite", "print('hi')\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "print('hi')\n");
  auto w = run("rewrite --stdin", "df['A'].sort_values().head(n=5)\n");
  EXPECT_NE(w.out.find("nsmallest(n=5)"), std::string::npos);
}

TEST(Cli, ReportGoesToItsOwnStream) {
  auto err = (fs::temp_directory_path() / "cellrw_cli_err.txt").string();
  auto r = run("rewrite --report json --cell-id c7", "df['A'].sort_values().head(n=5)\n", err);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.find("\"outcome\""), std::string::npos);
  auto j = nlohmann::json::parse(read_text(err));
  EXPECT_EQ(j["cell_id"], "c7");
  EXPECT_EQ(j["outcome"], "rewritten");
  auto rf = fs::temp_directory_path() / "cellrw_cli_report.jsonl";
  fs::remove(rf);
  run("rewrite --report json --report-file " + rf.string(), "x = 1\n");
  EXPECT_EQ(nlohmann::json::parse(read_text(rf))["outcome"], "pass-through");
}

TEST(Cli, DefaultReportIsNone) {
  auto err = (fs::temp_directory_path() / "cellrw_cli_err2.txt").string();
  run("rewrite", "df['A'].sort_values().head(n=5)\n", err);
  EXPECT_EQ(read_text(err), "");
}

TEST(Cli, RuleSelection) {
  std::string cell = "df['A'].sort_values().head(n=5)\n";
  EXPECT_EQ(run("rewrite --rules concat-lists", cell).out, cell);
  EXPECT_EQ(run("rewrite --disable nsmallest", cell).out, cell);
  EXPECT_NE(run("rewrite --rules nsmallest,concat-lists", cell).out, cell);
  EXPECT_EQ(run("rewrite --rules bogus", cell).code, 1);
  EXPECT_EQ(run("rewrite --disable bogus", cell).code, 1);
  EXPECT_EQ(run("rewrite --report xml", cell).code, 1);
}

TEST(Cli, EnvironmentDefaultForRules) {
  std::string cell = "df['A'].sort_values().head(n=5)\n";
  auto in = temp_file("cellrw_env_in.py", cell);
  std::string cmd = "CELLRW_RULES=concat-lists " + std::string(CELLRW_BIN) + " rewrite --file " + in.string();
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  pclose(p);
  EXPECT_EQ(out, cell);
  cmd = "CELLRW_RULES=concat-lists " + std::string(CELLRW_BIN) + " rewrite --rules nsmallest --file " + in.string();
  p = popen(cmd.c_str(), "r");
  out.clear();
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  pclose(p);
  EXPECT_NE(out, cell);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("rewrite --file /nonexistent/cell.py").code, 2);
  EXPECT_EQ(run("rewrite --notebook /nonexistent/nb.ipynb").code, 2);
  EXPECT_EQ(run("rewrite --history /nonexistent/h.py", "x = 1\n").code, 2);
  auto bad = temp_file("cellrw_bad.ipynb", "{\"cells\": [");
  EXPECT_EQ(run("rewrite --notebook " + bad.string()).code, 2);
  EXPECT_EQ(run("rewrite", "%matplotlib inline\n").code, 0);
  EXPECT_EQ(run("rewrite --file a.py --notebook b.ipynb").code, 1);
  EXPECT_EQ(run("").code, 1);
}

TEST(Cli, HistoryFile) {
  auto hist = temp_file("cellrw_hist.py",
                        "# %%\nimport pandas as pd\n# %%\ndef f(r):\n    return r['a'] + 1\n# %%\nprint(2)\n");
  auto r = run("rewrite --history " + hist.string(), "out = df.apply(f, axis=1)\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("out = f(df)"), std::string::npos);
}

TEST(Cli, DiffAndInPlace) {
  auto f = temp_file("cellrw_inplace.py", "x = 1\ny = s.sort_values().head(n=5)\n");
  auto d = run("rewrite --diff --file " + f.string());
  EXPECT_EQ(d.out.rfind("--- a/" + f.string() + "\n+++ b/" + f.string() + "\n", 0), 0u);
  EXPECT_NE(d.out.find("\n-y = s.sort_values().head(n=5)\n"), std::string::npos);
  EXPECT_EQ(run("rewrite --in-place --file " + f.string()).out, "");
  EXPECT_NE(read_text(f).find("s.nsmallest(n=5)"), std::string::npos);
  EXPECT_EQ(run("rewrite --in-place", "x\n").code, 1);
}

TEST(Cli, NotebookInPlace) {
  auto src = read_text(data_path("fixtures/history.ipynb"));
  auto f = temp_file("cellrw_nb.ipynb", src);
  auto out = run("rewrite --notebook " + f.string());
  EXPECT_EQ(out.code, 0);
  EXPECT_NE(out.out, src);
  run("rewrite --in-place --notebook " + f.string());
  EXPECT_EQ(read_text(f), out.out);
  auto untouched = temp_file("cellrw_nb2.ipynb", src);
  EXPECT_EQ(run("rewrite --notebook " + untouched.string() + " --rules substr-contains").out, src);
}

TEST(Cli, Explain) {
  auto r = run("explain", "df['A'].sort_values().head(n=5)\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("nsmallest"), std::string::npos);
  EXPECT_NE(r.out.find("+++ rewritten"), std::string::npos);
}
