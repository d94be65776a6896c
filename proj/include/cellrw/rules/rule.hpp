#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cellrw/rules/pattern.hpp"

namespace cellrw::rules {

// Statement window (start index, length) inside one statement list.
struct Window {
  std::size_t start = 0;
  std::size_t length = 1;

  bool operator==(const Window&) const = default;
};

struct Synthesis;

struct Bindings {
  std::map<std::string, const Node*> frags;
  Window matched_span;
  std::size_t form = 0;
  // Matched expression of an expression-level rule, null otherwise.
  const Node* anchor = nullptr;
  // The statements of the window.
  std::vector<const Node*> window;
  // Nodes created during matching (lambda parameters, signature defaults).
  std::vector<std::shared_ptr<const Node>> owned;
  // Right-hand side produced by a deferred rule.
  std::shared_ptr<const Synthesis> synthesis;

  const Node* get(const std::string& binder) const {
    auto it = frags.find(binder);
    return it == frags.end() ? nullptr : it->second;
  }
};

struct SyntacticPrecondition {
  enum class Kind {
    FragmentsEqual,   // a == b structurally
    ArityEquals,      // tuple/list bound to a has n elements
    IntEquals,        // int constant bound to a equals n
    HasTrailingElse,  // if-chain bound to a ends in a plain else
    Custom,
  };
  Kind kind = Kind::FragmentsEqual;
  std::string a;
  std::string b;
  long long n = 0;
  bool negate = false;
  std::string label;
  std::vector<std::string> custom_binders;
  std::function<bool(const Bindings&)> custom;

  static SyntacticPrecondition fragments_equal(std::string a, std::string b);
  static SyntacticPrecondition fragments_differ(std::string a, std::string b);
  static SyntacticPrecondition arity_equals(std::string a, long long n);
  static SyntacticPrecondition int_equals(std::string a, long long n);
  static SyntacticPrecondition has_trailing_else(std::string a);
  static SyntacticPrecondition make_custom(std::string label, std::vector<std::string> binders,
                                           std::function<bool(const Bindings&)> fn);

  std::vector<std::string> binders() const;
  bool holds(const Bindings& b) const;
  std::string describe() const;
};

// A boolean guard expression over binders (@{x}) and generated names
// (@{$pd}, @{$np}, ...).
struct RuntimePreconditionTemplate {
  std::string text;
  NodePtr guard_expr;
};

RuntimePreconditionTemplate runtime_precondition(std::string_view text);

// Deferred right-hand side, produced after analyzing a resolved function.
struct Synthesis {
  std::string classification;
  std::vector<NodePtr> rhs;
  std::vector<RuntimePreconditionTemplate> guards;
  // Evaluated after the integrity guard; may rely on the analyzed definition.
  std::vector<RuntimePreconditionTemplate> trusted_guards;
  // Function whose runtime source must still match what was analyzed.
  std::string integrity_fun;
  const Node* analyzed_def = nullptr;
};

struct MatchContext {
  // Resolves a function name to its definition as visible from the
  // top-level statement `top_index` of the current cell.
  std::function<const Node*(std::string_view name, std::size_t top_index)> resolve_function;
  // Source of the cell; when set, statements that share a line with other
  // code are not eligible.
  std::string_view source;
};

using Synthesizer = std::function<std::optional<Synthesis>(const Bindings&, const MatchContext&, std::size_t top_index)>;

struct RhsSpec {
  std::vector<NodePtr> stmts;  // static template
  Synthesizer synthesize;      // deferred rules

  bool deferred() const { return static_cast<bool>(synthesize); }
};

RhsSpec static_rhs(std::string_view text);

struct RuleForm {
  std::string label;
  PatternTemplate lhs;
  std::vector<SyntacticPrecondition> sprecs;
  std::vector<RuntimePreconditionTemplate> rprecs;
  RhsSpec rhs;
  SignatureTable signatures;
  std::optional<Anchor> anchor;
};

enum class RuleKind { Plain, Guarded, Deferred };

std::string_view rule_kind_name(RuleKind k);

struct RewriteRule {
  std::string id;
  RuleKind kind = RuleKind::Guarded;
  std::string summary;
  std::vector<RuleForm> forms;

  const PatternTemplate& lhs() const { return forms.front().lhs; }
};

// Throws RuleError naming the offending binder.
void validate_rule(const RewriteRule& rule);

// Ordered rules plus an enable flag per rule. Order is match priority.
class Registry {
 public:
  Registry() = default;
  explicit Registry(std::vector<RewriteRule> rules);

  const std::vector<RewriteRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  const RewriteRule& operator[](std::size_t i) const { return rules_[i]; }
  const RewriteRule* find(std::string_view id) const;

  bool enabled(std::size_t i) const { return enabled_[i]; }
  // Both return the ids that name no rule; flags are unchanged then.
  std::vector<std::string> enable_only(const std::vector<std::string>& ids);
  std::vector<std::string> disable(const std::vector<std::string>& ids);

 private:
  std::vector<RewriteRule> rules_;
  std::vector<bool> enabled_;
};

}  // namespace cellrw::rules
