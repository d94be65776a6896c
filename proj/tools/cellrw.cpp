#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cellrw/driver/driver.hpp"
#include "cellrw/library/builtin.hpp"
#include "cellrw/transform/emit.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kUnreadable = 2;
constexpr int kInvariant = 3;

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return ss.str();
}

bool spill(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << data;
  return static_cast<bool>(out);
}

std::vector<std::string> split_ids(const std::string& csv) {
  std::vector<std::string> ids;
  std::stringstream ss(csv);
  for (std::string id; std::getline(ss, id, ',');) {
    auto b = id.find_first_not_of(" \t");
    auto e = id.find_last_not_of(" \t");
    if (b != std::string::npos) ids.push_back(id.substr(b, e - b + 1));
  }
  return ids;
}

void error_json(const std::string& kind, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = kind;
  j["message"] = message;
  std::cerr << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
}

struct Args {
  std::string file, notebook, history, rules, disable, report = "none", report_file, cell_id;
  bool use_stdin = false, diff = false, in_place = false;
};

int select_rules(cellrw::rules::Registry& reg, const Args& a) {
  std::string rules = a.rules;
  if (rules.empty())
    if (const char* env = std::getenv("CELLRW_RULES")) rules = env;
  std::vector<std::string> unknown;
  if (!rules.empty()) unknown = reg.enable_only(split_ids(rules));
  if (!a.disable.empty())
    for (auto& id : reg.disable(split_ids(a.disable))) unknown.push_back(id);
  if (!unknown.empty()) {
    std::string list;
    for (const auto& id : unknown) list += (list.empty() ? "" : ", ") + id;
    error_json("unknown-rule", "unknown rule id: " + list);
    return kUsage;
  }
  return 0;
}

int run_rewrite(const Args& a, bool explain_only) {
  auto reg = cellrw::library::builtin_rules();
  if (int rc = select_rules(reg, a)) return rc;

  cellrw::driver::History history;
  if (!a.history.empty()) {
    auto text = slurp(a.history);
    if (!text) {
      error_json("unreadable-input", "cannot read history file " + a.history);
      return kUnreadable;
    }
    history = cellrw::driver::History::from_text(*text);
  }

  std::string input;
  std::string path = !a.notebook.empty() ? a.notebook : a.file;
  if (!path.empty()) {
    auto text = slurp(path);
    if (!text) {
      error_json("unreadable-input", "cannot read " + path);
      return kUnreadable;
    }
    input = std::move(*text);
  } else {
    input.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    if (std::cin.bad()) {
      error_json("unreadable-input", "cannot read standard input");
      return kUnreadable;
    }
  }

  std::ofstream report_file;
  std::ostream* report = &std::cerr;
  if (!a.report_file.empty()) {
    report_file.open(a.report_file, std::ios::binary | std::ios::trunc);
    if (!report_file) {
      error_json("unwritable-output", "cannot write " + a.report_file);
      return kUnreadable;
    }
    report = &report_file;
  }
  auto emit_report = [&](const cellrw::driver::CellReport& r) {
    if (a.report == "json") *report << cellrw::driver::report_json(r) << "\n";
  };

  try {
    if (explain_only) {
      std::cout << cellrw::driver::explain(input, history, reg);
      return 0;
    }
    std::string output;
    if (!a.notebook.empty()) {
      auto res = cellrw::driver::rewrite_notebook(input, std::move(history), reg);
      for (const auto& r : res.reports) emit_report(r);
      output = std::move(res.text);
    } else {
      cellrw::syntax::SourceText src;
      src.text = input;
      src.origin.kind = a.file.empty() ? cellrw::syntax::Origin::Kind::Cell : cellrw::syntax::Origin::Kind::File;
      src.origin.id = !a.cell_id.empty() ? a.cell_id : (a.file.empty() ? "stdin" : a.file);
      auto res = cellrw::driver::rewrite_cell(src, history, reg);
      emit_report(res.report);
      output = std::move(res.text);
    }
    if (a.diff) {
      std::cout << cellrw::driver::unified_diff(input, output, path.empty() ? "a/stdin" : "a/" + path,
                                                path.empty() ? "b/stdin" : "b/" + path);
    } else if (a.in_place) {
      if (output != input && !spill(path, output)) {
        error_json("unwritable-output", "cannot write " + path);
        return kUnreadable;
      }
    } else {
      std::cout << output;
    }
  } catch (const cellrw::driver::NotebookError& e) {
    error_json("malformed-notebook", e.what());
    return kUnreadable;
  } catch (const cellrw::transform::InvariantViolation& e) {
    error_json("invariant-violation", e.what());
    return kInvariant;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Guarded source-to-source rewriting of pandas notebook cells"};
  app.require_subcommand(1);
  Args a;

  auto add_input = [&](CLI::App* cmd) {
    auto* f = cmd->add_option("--file", a.file, "Python source file");
    auto* s = cmd->add_flag("--stdin", a.use_stdin, "Read the cell from standard input (default)");
    cmd->add_option("--history", a.history, "Previously executed cells, separated by '# %%' lines");
    cmd->add_option("--rules", a.rules, "Comma-separated rule ids to enable (default: $CELLRW_RULES or all)");
    cmd->add_option("--disable", a.disable, "Comma-separated rule ids to disable");
    return std::pair{f, s};
  };

  auto* rewrite = app.add_subcommand("rewrite", "Rewrite a cell, file or notebook");
  auto [file_opt, stdin_opt] = add_input(rewrite);
  auto* nb = rewrite->add_option("--notebook", a.notebook, "Notebook document (.ipynb)");
  file_opt->excludes(nb)->excludes(stdin_opt);
  nb->excludes(stdin_opt);
  rewrite->add_option("--report", a.report, "Per-cell report format")->check(CLI::IsMember({"json", "none"}));
  rewrite->add_option("--report-file", a.report_file, "Write reports here instead of standard error");
  rewrite->add_option("--cell-id", a.cell_id, "Cell id used in the report");
  auto* diff = rewrite->add_flag("--diff", a.diff, "Print a unified diff instead of the rewritten source");
  auto* inplace = rewrite->add_flag("--in-place", a.in_place, "Overwrite the input file");
  diff->excludes(inplace);

  auto* explain = app.add_subcommand("explain", "Show the diff and the matched rules for a cell");
  auto [efile, estdin] = add_input(explain);
  efile->excludes(estdin);

  app.add_subcommand("list-rules", "List builtin rule ids in priority order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  if (app.got_subcommand("list-rules")) {
    auto reg = cellrw::library::builtin_rules();
    for (const auto& r : reg.rules())
      std::cout << r.id << "\t" << cellrw::rules::rule_kind_name(r.kind) << "\t" << r.summary << "\n";
    return 0;
  }
  if (a.in_place && a.file.empty() && a.notebook.empty()) {
    error_json("usage", "--in-place needs --file or --notebook");
    return kUsage;
  }
  return run_rewrite(a, app.got_subcommand("explain"));
}
