#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cellrw/rules/rule.hpp"
#include "cellrw/syntax/parser.hpp"

namespace cellrw::driver {

using syntax::Node;

// Source of previously executed cells. A buffer read from a file is split into
// chunks at lines starting with "# %%"; each chunk is parsed on first use.
class History {
 public:
  History() = default;
  static History from_text(std::string_view text);

  void append(std::string cell_source);
  std::size_t size() const { return chunks_.size(); }
  bool empty() const { return chunks_.empty(); }
  const std::string& chunk(std::size_t i) const { return chunks_[i]->text; }

  // Latest top-level definition of `name`, or null when the name is unbound
  // or its latest top-level binding is not a plain function definition.
  const Node* find_function(std::string_view name) const;
  // True when `name` has a top-level binding in some chunk.
  bool binds(std::string_view name) const;

  // Joined with "# %%" separators, the inverse of from_text.
  std::string text() const;

 private:
  struct Chunk {
    std::string text;
    mutable bool parsed = false;
    mutable std::optional<syntax::Module> module;
  };
  const syntax::Module* module(const Chunk& c) const;

  std::vector<std::unique_ptr<Chunk>> chunks_;
};

// Binding search over top-level statements [0, end), latest first.
enum class Lookup { Found, Unbound, Shadowed };
Lookup find_top_level_function(const std::vector<syntax::NodePtr>& stmts, std::size_t end, std::string_view name,
                               const Node** out);

enum class Outcome { Rewritten, PassThrough, ParseFailure };
std::string_view outcome_name(Outcome o);

struct MatchRecord {
  std::string rule;
  int first_line = 0;  // 1-based, inclusive
  int last_line = 0;
  std::string guard_summary;
};

struct Timings {
  std::int64_t parse_us = 0;
  std::int64_t match_us = 0;
  std::int64_t codegen_us = 0;
  std::int64_t total_us = 0;
};

struct CellReport {
  std::string cell_id;
  Outcome outcome = Outcome::PassThrough;
  std::vector<MatchRecord> matches;
  Timings timings;
  std::size_t bytes_in = 0;
  std::size_t bytes_out = 0;
  std::vector<std::string> skipped;  // reasons a cell or match was left alone
};

// One line of JSON, no trailing newline. Timings are omitted when
// `with_timings` is false so reports can be compared across runs.
std::string report_json(const CellReport& r, bool with_timings = true);

struct CellResult {
  std::string text;
  CellReport report;
};

// Never fails on cell content: parse failures and non-matches return the
// input unchanged. Throws transform::InvariantViolation on an internal error.
CellResult rewrite_cell(const syntax::SourceText& src, const History& history, const rules::Registry& registry);
CellResult rewrite_cell(std::string_view text, const History& history, const rules::Registry& registry);

class NotebookError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NotebookResult {
  std::string text;
  std::vector<CellReport> reports;
  bool changed = false;
};

// Rewrites the code cells of a notebook document in order, threading their
// original sources into `history`. Only the `source` values of rewritten
// cells change; everything else is kept byte for byte. Throws NotebookError
// on a malformed document.
NotebookResult rewrite_notebook(std::string_view document, History history, const rules::Registry& registry);

// Unified diff of two texts, "a" and "b" being the file labels.
std::string unified_diff(std::string_view a, std::string_view b, std::string_view label_a = "original",
                         std::string_view label_b = "rewritten", int context = 3);

// Diff followed by one row per match: rule id, lines, guard summary.
std::string explain(std::string_view text, const History& history, const rules::Registry& registry);

}  // namespace cellrw::driver
