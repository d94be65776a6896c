#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cellrw/rules/rule.hpp"
#include "cellrw/syntax/names.hpp"

namespace cellrw::transform {

using rules::Bindings;
using rules::RewriteRule;
using syntax::Node;
using syntax::NodePtr;

// Names substituted during instantiation. A fresh hole missing from `fresh`
// renders as its bare base name.
struct TempMap {
  std::map<std::string, std::string> binders;  // hoisted binder -> temp
  std::map<std::string, std::string> fresh;    // @{$base} -> identifier
};

NodePtr instantiate_expr(const Node& templ, const Bindings& b, const TempMap& temps);
std::vector<NodePtr> instantiate_rhs(const RewriteRule& rule, const Bindings& b, const TempMap& temps);

struct GuardContract {
  std::vector<std::pair<std::string, const Node*>> hoisted;  // temp, bound expression
  NodePtr condition;                                         // null for plain rules
  std::optional<std::string> integrity_digest;
};

struct RewritePlan {
  std::string rule_id;
  rules::Window window;
  std::vector<const Node*> original;
  const Node* anchor = nullptr;  // matched expression of an expression-level rule
  std::vector<NodePtr> replacement;
  std::vector<std::string> used_temps;
  GuardContract guard;
  std::string guard_summary;
};

// `keep_value`: the window is the cell's last top-level statement, so an
// expression statement keeps its displayed value through a result temp.
RewritePlan emit_guarded(const RewriteRule& rule, const Bindings& b, const std::vector<const Node*>& original_window,
                         syntax::FreshNamePool& pool, bool keep_value = true);

struct IntegrityGuard {
  std::string digest;  // sha256 hex of the canonical function source
  NodePtr guard;       // template expression using @{$inspect}, @{$hashlib}, @{$ast}, @{$textwrap}
};

// `analyzed_source` is the canonical source of the analyzed definition.
IntegrityGuard emit_integrity_guard(std::string_view fun_name, std::string_view analyzed_source);

// Canonical text the runtime reproduces with
// ast.unparse(ast.parse(textwrap.dedent(inspect.getsource(f)))).
std::string canonical_function_source(const Node& def);
std::string sha256_hex(std::string_view data);

class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Names bound by statements, ignoring nested function and class bodies.
std::set<std::string> assigned_names(const std::vector<const Node*>& stmts);

// Single evaluation, branch completeness and replacement validity.
// Throws InvariantViolation.
void check_plan_invariants(const RewritePlan& plan);

}  // namespace cellrw::transform
