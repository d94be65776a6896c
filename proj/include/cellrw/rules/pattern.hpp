#pragma once

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cellrw/syntax/ast.hpp"

namespace cellrw::rules {

using syntax::HoleKind;
using syntax::HoleSpec;
using syntax::Node;
using syntax::NodeKind;
using syntax::NodePtr;

class RuleError : public std::runtime_error {
 public:
  RuleError(std::string message, std::string binder)
      : std::runtime_error(std::move(message)), binder_(std::move(binder)) {}
  const std::string& binder() const { return binder_; }

 private:
  std::string binder_;
};

// Parameter list of a library method, used to bring `f(5)`, `f(n=5)` and
// `f()` to one canonical form before matching.
struct Param {
  std::string name;
  std::shared_ptr<const Node> default_value;  // null when required
  bool positional = true;
};

struct Signature {
  std::vector<Param> params;
};

// "pat=None, n=-1, *, expand=False"; parameters after `*` are keyword-only.
Signature make_signature(std::string_view spec);

using SignatureTable = std::map<std::string, Signature, std::less<>>;

// Arguments of `call` in signature order with defaults filled in. Empty when
// the call cannot be normalized (star-args, unknown or duplicate keywords,
// too many positionals, missing required parameter).
std::optional<std::vector<const Node*>> normalize_call(const Node& call, const Signature& sig);

// Method or function name of a call's callee, empty for other callees.
std::string_view callee_name(const Node& call);

enum class PatternLevel {
  Statement,   // matches a window of consecutive statements
  Expression,  // matches one expression inside a statement
};

struct PatternTemplate {
  PatternLevel level = PatternLevel::Statement;
  std::vector<NodePtr> stmts;

  std::size_t statement_arity() const { return level == PatternLevel::Expression ? 1 : stmts.size(); }
  // The template expression of an expression-level pattern.
  const Node* root_expr() const;
  // Binding holes in source order, anonymous holes excluded.
  std::vector<HoleSpec> binders() const;
};

// Parses a template. Throws RuleError on syntax errors, duplicate binders
// or fresh-name holes.
PatternTemplate compile_pattern(std::string_view text, PatternLevel level);

// Top-level anchor used by dispatch: the outermost call of the pattern and
// the node kind its first argument must have.
struct Anchor {
  std::string callee;
  std::optional<NodeKind> arg0;
  std::string arg0_keyword;  // name the first argument may be passed under
};

std::optional<Anchor> anchor_of(const PatternTemplate& p, const SignatureTable& sigs);

}  // namespace cellrw::rules
