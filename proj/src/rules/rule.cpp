#include "cellrw/rules/rule.hpp"

#include <algorithm>
#include <variant>

#include "cellrw/syntax/names.hpp"
#include "cellrw/syntax/parser.hpp"
#include "cellrw/syntax/unparse.hpp"

namespace cellrw::rules {

using namespace syntax;

SyntacticPrecondition SyntacticPrecondition::fragments_equal(std::string a, std::string b) {
  SyntacticPrecondition p;
  p.kind = Kind::FragmentsEqual;
  p.a = std::move(a);
  p.b = std::move(b);
  return p;
}

SyntacticPrecondition SyntacticPrecondition::fragments_differ(std::string a, std::string b) {
  auto p = fragments_equal(std::move(a), std::move(b));
  p.negate = true;
  return p;
}

SyntacticPrecondition SyntacticPrecondition::arity_equals(std::string a, long long n) {
  SyntacticPrecondition p;
  p.kind = Kind::ArityEquals;
  p.a = std::move(a);
  p.n = n;
  return p;
}

SyntacticPrecondition SyntacticPrecondition::int_equals(std::string a, long long n) {
  SyntacticPrecondition p;
  p.kind = Kind::IntEquals;
  p.a = std::move(a);
  p.n = n;
  return p;
}

SyntacticPrecondition SyntacticPrecondition::has_trailing_else(std::string a) {
  SyntacticPrecondition p;
  p.kind = Kind::HasTrailingElse;
  p.a = std::move(a);
  return p;
}

SyntacticPrecondition SyntacticPrecondition::make_custom(std::string label, std::vector<std::string> binders,
                                                         std::function<bool(const Bindings&)> fn) {
  SyntacticPrecondition p;
  p.kind = Kind::Custom;
  p.label = std::move(label);
  p.custom_binders = std::move(binders);
  p.custom = std::move(fn);
  return p;
}

std::vector<std::string> SyntacticPrecondition::binders() const {
  switch (kind) {
    case Kind::FragmentsEqual: return {a, b};
    case Kind::Custom: return custom_binders;
    default: return {a};
  }
}

bool SyntacticPrecondition::holds(const Bindings& bs) const {
  bool r = false;
  switch (kind) {
    case Kind::FragmentsEqual: {
      const Node* x = bs.get(a);
      const Node* y = bs.get(b);
      r = x && y && structurally_equal(x, y);
      break;
    }
    case Kind::ArityEquals: {
      const Node* x = bs.get(a);
      r = x && (x->kind == NodeKind::Tuple || x->kind == NodeKind::List || x->kind == NodeKind::Set) &&
          static_cast<long long>(x->kids.size()) == n;
      break;
    }
    case Kind::IntEquals: {
      const Node* x = bs.get(a);
      r = x && x->kind == NodeKind::Constant && x->constant == ConstKind::Int && x->text == std::to_string(n);
      break;
    }
    case Kind::HasTrailingElse: {
      const Node* x = bs.get(a);
      while (x && x->kind == NodeKind::If) {
        const Node* orelse = x->kid(2);
        if (orelse->kids.empty()) break;
        if (orelse->kids.size() == 1 && orelse->kid(0)->kind == NodeKind::If) {
          x = orelse->kid(0);
          continue;
        }
        r = true;
        break;
      }
      break;
    }
    case Kind::Custom: r = custom && custom(bs); break;
  }
  return negate ? !r : r;
}

std::string SyntacticPrecondition::describe() const {
  std::string s;
  switch (kind) {
    case Kind::FragmentsEqual: s = a + (negate ? " != " : " == ") + b; return s;
    case Kind::ArityEquals: s = "len(" + a + ") == " + std::to_string(n); break;
    case Kind::IntEquals: s = a + " == " + std::to_string(n); break;
    case Kind::HasTrailingElse: s = a + " has else"; break;
    case Kind::Custom: s = label; break;
  }
  return negate ? "not " + s : s;
}

RuntimePreconditionTemplate runtime_precondition(std::string_view text) {
  auto parsed = parse_expression(text, true);
  if (auto* f = std::get_if<ParseFailure>(&parsed)) throw RuleError("guard template: " + f->message, "");
  return {std::string(text), std::move(std::get<NodePtr>(parsed))};
}

RhsSpec static_rhs(std::string_view text) {
  auto parsed = parse_template(text);
  if (auto* f = std::get_if<ParseFailure>(&parsed)) throw RuleError("rhs template: " + f->message, "");
  RhsSpec r;
  r.stmts = std::move(std::get<Module>(parsed).root->kids);
  return r;
}

std::string_view rule_kind_name(RuleKind k) {
  switch (k) {
    case RuleKind::Plain: return "plain";
    case RuleKind::Guarded: return "guarded";
    case RuleKind::Deferred: return "deferred";
  }
  return "?";
}

namespace {

void require_bound(const Node& root, const std::set<std::string>& bound) {
  walk(root, [&](const Node& n) {
    if (n.hole && n.hole->reference && !bound.count(n.hole->binder))
      throw RuleError("unbound binder '" + n.hole->binder + "'", n.hole->binder);
  });
}

}  // namespace

void validate_rule(const RewriteRule& rule) {
  if (rule.id.empty()) throw RuleError("rule without id", "");
  if (rule.forms.empty()) throw RuleError("rule '" + rule.id + "' has no forms", "");
  for (const auto& form : rule.forms) {
    if (form.lhs.stmts.empty() || form.lhs.statement_arity() < 1)
      throw RuleError("rule '" + rule.id + "' has an empty left-hand side", "");
    std::set<std::string> bound;
    for (const auto& h : form.lhs.binders())
      if (!bound.insert(h.binder).second) throw RuleError("duplicate binder '" + h.binder + "'", h.binder);
    for (const auto& s : form.lhs.stmts) require_bound(*s, bound);
    for (const auto& p : form.sprecs)
      for (const auto& b : p.binders())
        if (!bound.count(b)) throw RuleError("unbound binder '" + b + "'", b);
    for (const auto& r : form.rprecs) require_bound(*r.guard_expr, bound);
    for (const auto& s : form.rhs.stmts) require_bound(*s, bound);
    if (!form.rhs.deferred() && form.rhs.stmts.empty())
      throw RuleError("rule '" + rule.id + "' has no right-hand side", "");
    if (form.rhs.deferred() != (rule.kind == RuleKind::Deferred))
      throw RuleError("rule '" + rule.id + "' kind does not match its right-hand side", "");
    if (rule.kind == RuleKind::Plain && !form.rprecs.empty())
      throw RuleError("plain rule '" + rule.id + "' has runtime preconditions", "");
    if (form.lhs.level == PatternLevel::Expression && !form.rhs.deferred() &&
        form.rhs.stmts.back()->kind != NodeKind::Expr)
      throw RuleError("expression rule '" + rule.id + "' must end its right-hand side with an expression", "");
  }
}

Registry::Registry(std::vector<RewriteRule> rules) : rules_(std::move(rules)), enabled_(rules_.size(), true) {
  std::set<std::string> ids;
  for (auto& r : rules_) {
    validate_rule(r);
    if (!ids.insert(r.id).second) throw RuleError("duplicate rule id '" + r.id + "'", "");
    for (auto& f : r.forms)
      if (!f.anchor) f.anchor = anchor_of(f.lhs, f.signatures);
  }
}

const RewriteRule* Registry::find(std::string_view id) const {
  for (const auto& r : rules_)
    if (r.id == id) return &r;
  return nullptr;
}

std::vector<std::string> Registry::enable_only(const std::vector<std::string>& ids) {
  std::vector<std::string> unknown;
  for (const auto& id : ids)
    if (!find(id)) unknown.push_back(id);
  if (!unknown.empty()) return unknown;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    enabled_[i] = std::find(ids.begin(), ids.end(), rules_[i].id) != ids.end();
  return unknown;
}

std::vector<std::string> Registry::disable(const std::vector<std::string>& ids) {
  std::vector<std::string> unknown;
  for (const auto& id : ids)
    if (!find(id)) unknown.push_back(id);
  if (!unknown.empty()) return unknown;
  for (std::size_t i = 0; i < rules_.size(); ++i)
    if (std::find(ids.begin(), ids.end(), rules_[i].id) != ids.end()) enabled_[i] = false;
  return unknown;
}

}  // namespace cellrw::rules
