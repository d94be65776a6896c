#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cellrw/rules/rule.hpp"

namespace cellrw::rules {

// Ids of the enabled rules whose anchor occurs in `stmt`. A rule that can
// match `stmt` is always included.
std::vector<std::string> dispatch(const Node& stmt, const Registry& registry);

// Tries each form of `rule` at stmts[start]. Expression-level forms search
// the eligible positions of the statement outermost first.
std::optional<Bindings> match_window(const RewriteRule& rule, const std::vector<const Node*>& stmts, std::size_t start);

bool check_syntactic(const RewriteRule& rule, const Bindings& b);

struct ScanMatch {
  std::string rule_id;
  std::size_t rule_index = 0;
  Bindings bindings;
  std::size_t top_index = 0;  // enclosing top-level statement
  int depth = 0;              // 0 for top-level statements
};

// Greedy left-to-right scan with recursion into nested bodies. Statements
// mentioning the reserved prefix are skipped.
std::vector<ScanMatch> scan_cell(const std::vector<const Node*>& stmts, const Registry& registry,
                                 const MatchContext& ctx = {});

// Candidate expression positions of a simple statement, outermost first.
std::vector<const Node*> expression_sites(const Node& stmt);

}  // namespace cellrw::rules
