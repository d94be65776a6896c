#include "cellrw/transform/emit.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <functional>
#include <variant>

#include "cellrw/syntax/parser.hpp"
#include "cellrw/syntax/unparse.hpp"

namespace cellrw::transform {

using namespace syntax;

namespace {

// Generated names that stand for an imported module.
constexpr std::pair<std::string_view, std::string_view> kModules[] = {
    {"pd", "pandas"}, {"np", "numpy"}, {"inspect", "inspect"}, {"hashlib", "hashlib"}, {"ast", "ast"}, {"textwrap", "textwrap"},
};

using Replace = std::function<NodePtr(const Node&)>;

NodePtr clone_with(const Node& n, const Replace& repl) {
  if (auto r = repl(n)) return r;
  auto c = make_node(n.kind);
  c->text = n.text;
  c->text2 = n.text2;
  c->constant = n.constant;
  c->flag = n.flag;
  c->level = n.level;
  c->ops = n.ops;
  c->hole = n.hole;
  c->kids.reserve(n.kids.size());
  for (const auto& k : n.kids) c->kids.push_back(k ? clone_with(*k, repl) : nullptr);
  return c;
}

NodePtr assign(NodePtr target, NodePtr value) {
  auto a = make_node(NodeKind::Assign);
  std::vector<NodePtr> targets;
  targets.push_back(std::move(target));
  a->kids.push_back(make_seq(std::move(targets)));
  a->kids.push_back(std::move(value));
  return a;
}

NodePtr expr_stmt(NodePtr value) {
  auto e = make_node(NodeKind::Expr);
  e->kids.push_back(std::move(value));
  return e;
}

NodePtr false_const() {
  auto c = make_node(NodeKind::Constant);
  c->constant = ConstKind::False;
  return c;
}

NodePtr import_as(std::string_view module, const std::string& alias) {
  auto imp = make_node(NodeKind::Import);
  auto a = make_node(NodeKind::Alias);
  a->text = std::string(module);
  a->text2 = alias;
  imp->kids.push_back(std::move(a));
  return imp;
}

void collect_holes(const Node& n, std::vector<std::string>& refs, std::set<std::string>& fresh) {
  walk(n, [&](const Node& x) {
    if (!x.hole) return;
    if (x.hole->fresh) fresh.insert(x.hole->binder);
    else if (!x.hole->binder.empty() && std::find(refs.begin(), refs.end(), x.hole->binder) == refs.end())
      refs.push_back(x.hole->binder);
  });
}

std::size_t count_equal(const Node& root, const Node& target);

// A store target is not an evaluation of itself, but its receiver and index are.
std::size_t count_in_target(const Node& t, const Node& target) {
  if (t.kind == NodeKind::Tuple || t.kind == NodeKind::List) {
    std::size_t n = 0;
    for (const auto& k : t.kids)
      if (k) n += count_in_target(*k, target);
    return n;
  }
  if (t.kind == NodeKind::Starred) return count_in_target(*t.kid(0), target);
  std::size_t n = 0;
  for (const auto& k : t.kids)
    if (k) n += count_equal(*k, target);
  return n;
}

std::size_t count_equal(const Node& root, const Node& target) {
  if (root.kind == NodeKind::Assign) {
    std::size_t n = 0;
    for (const auto& t : root.kid(0)->kids) n += count_in_target(*t, target);
    return n + count_equal(*root.kid(1), target);
  }
  if (root.kind == NodeKind::For) {
    std::size_t n = count_in_target(*root.kid(0), target);
    for (std::size_t i = 1; i < root.kids.size(); ++i)
      if (root.kids[i]) n += count_equal(*root.kids[i], target);
    return n;
  }
  std::size_t n = root.kind == target.kind && structurally_equal(&root, &target) ? 1 : 0;
  for (const auto& k : root.kids)
    if (k) n += count_equal(*k, target);
  return n;
}

std::set<std::string> visible(std::set<std::string> names) {
  for (auto it = names.begin(); it != names.end();) {
    if (it->find(kReservedPrefix) != std::string::npos) it = names.erase(it);
    else ++it;
  }
  return names;
}

void target_names(const Node& t, std::set<std::string>& out) {
  switch (t.kind) {
    case NodeKind::Name: out.insert(t.text); break;
    case NodeKind::Tuple:
    case NodeKind::List:
      for (const auto& k : t.kids) target_names(*k, out);
      break;
    case NodeKind::Starred: target_names(*t.kid(0), out); break;
    default: break;
  }
}

std::vector<const Node*> seq_items(const Node& seq) {
  std::vector<const Node*> out;
  for (const auto& k : seq.kids) out.push_back(k.get());
  return out;
}

}  // namespace

NodePtr instantiate_expr(const Node& templ, const Bindings& b, const TempMap& temps) {
  return clone_with(templ, [&](const Node& n) -> NodePtr {
    if (!n.hole) return nullptr;
    const HoleSpec& h = *n.hole;
    std::string name;
    if (h.fresh) {
      auto it = temps.fresh.find(h.binder);
      name = it == temps.fresh.end() ? h.binder : it->second;
    } else if (auto it = temps.binders.find(h.binder); it != temps.binders.end()) {
      name = it->second;
    } else {
      const Node* bound = b.get(h.binder);
      if (!bound) throw InvariantViolation("right-hand side references unbound '" + h.binder + "'");
      if (n.kind == NodeKind::Arg) {
        auto a = make_node(NodeKind::Arg);
        a->text = bound->text;
        return a;
      }
      return clone(*bound, true);
    }
    if (n.kind == NodeKind::Arg) {
      auto a = make_node(NodeKind::Arg);
      a->text = name;
      return a;
    }
    return make_name(name);
  });
}

std::vector<NodePtr> instantiate_rhs(const RewriteRule& rule, const Bindings& b, const TempMap& temps) {
  const auto& stmts = b.synthesis ? b.synthesis->rhs : rule.forms[b.form].rhs.stmts;
  std::vector<NodePtr> out;
  for (const auto& s : stmts) out.push_back(instantiate_expr(*s, b, temps));
  return out;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw std::runtime_error("sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 0xF]);
  }
  return out;
}

std::string canonical_function_source(const Node& def) { return unparse_statement(def); }

IntegrityGuard emit_integrity_guard(std::string_view fun_name, std::string_view analyzed_source) {
  IntegrityGuard g;
  g.digest = sha256_hex(analyzed_source);
  std::string f(fun_name);
  std::string text = "@{$inspect}.isfunction(" + f + ") and @{$hashlib}.sha256(@{$ast}.unparse(@{$ast}.parse(" +
                     "@{$textwrap}.dedent(@{$inspect}.getsource(" + f + "))))" + ".encode()).hexdigest() == '" +
                     g.digest + "'";
  auto parsed = parse_expression(text, true);
  if (auto* fail = std::get_if<ParseFailure>(&parsed)) throw InvariantViolation("integrity guard: " + fail->message);
  g.guard = std::move(std::get<NodePtr>(parsed));
  return g;
}

std::set<std::string> assigned_names(const std::vector<const Node*>& stmts) {
  std::set<std::string> out;
  for (const Node* s : stmts) {
    walk_pruned(*s, [&](const Node& n) {
      switch (n.kind) {
        case NodeKind::Assign:
          for (const auto& t : n.kid(0)->kids) target_names(*t, out);
          return true;
        case NodeKind::AugAssign:
        case NodeKind::AnnAssign:
        case NodeKind::For:
        case NodeKind::NamedExpr: target_names(*n.kid(0), out); return true;
        case NodeKind::Delete:
          for (const auto& t : n.kids) target_names(*t, out);
          return true;
        case NodeKind::WithItem:
          if (n.kid(1)) target_names(*n.kid(1), out);
          return true;
        case NodeKind::Alias: {
          std::string name = n.text2.empty() ? n.text.substr(0, n.text.find('.')) : n.text2;
          if (name != "*") out.insert(name);
          return false;
        }
        case NodeKind::ExceptHandler:
          if (!n.text.empty()) out.insert(n.text);
          return true;
        case NodeKind::FunctionDef:
        case NodeKind::ClassDef: out.insert(n.text); return false;
        case NodeKind::Lambda:
        case NodeKind::ListComp:
        case NodeKind::SetComp:
        case NodeKind::DictComp:
        case NodeKind::GeneratorExp: return false;
        default: return true;
      }
    });
  }
  return out;
}

RewritePlan emit_guarded(const RewriteRule& rule, const Bindings& b, const std::vector<const Node*>& window,
                         FreshNamePool& pool, bool keep_value) {
  const auto& form = rule.forms[b.form];
  RewritePlan plan;
  plan.rule_id = rule.id;
  plan.window = b.matched_span;
  plan.original = window;
  plan.anchor = b.anchor;

  std::vector<const Node*> guards;
  for (const auto& r : form.rprecs) guards.push_back(r.guard_expr.get());
  IntegrityGuard integrity;
  if (b.synthesis) {
    for (const auto& g : b.synthesis->guards) guards.push_back(g.guard_expr.get());
    if (!b.synthesis->integrity_fun.empty() && b.synthesis->analyzed_def) {
      integrity = emit_integrity_guard(b.synthesis->integrity_fun, canonical_function_source(*b.synthesis->analyzed_def));
      plan.guard.integrity_digest = integrity.digest;
      guards.push_back(integrity.guard.get());
    }
    for (const auto& g : b.synthesis->trusted_guards) guards.push_back(g.guard_expr.get());
  }
  const auto& rhs_templates = b.synthesis ? b.synthesis->rhs : form.rhs.stmts;

  std::vector<std::string> refs;
  std::set<std::string> fresh;
  for (const Node* g : guards) collect_holes(*g, refs, fresh);
  {
    std::vector<std::string> rhs_refs;
    for (const auto& s : rhs_templates) collect_holes(*s, rhs_refs, fresh);
  }

  // Hoist guarded fragments so they are evaluated once, before the branch.
  auto rebound = assigned_names(window);
  std::vector<std::pair<std::string, const Node*>> hoist;
  for (const auto& binder : refs) {
    const Node* node = b.get(binder);
    if (!node || !node->span.valid() || node->kind == NodeKind::Constant) continue;
    if (node->kind == NodeKind::Name && !rebound.count(node->text)) continue;
    hoist.emplace_back(binder, node);
  }
  std::stable_sort(hoist.begin(), hoist.end(),
                   [](const auto& x, const auto& y) { return x.second->span.begin < y.second->span.begin; });

  TempMap temps;
  std::map<const Node*, std::string> by_node;
  for (const auto& [binder, node] : hoist) {
    auto t = pool.fresh(binder);
    temps.binders[binder] = t;
    by_node[node] = t;
    plan.guard.hoisted.emplace_back(t, node);
    plan.used_temps.push_back(t);
  }
  for (const auto& base : fresh) {
    temps.fresh[base] = pool.fresh(base);
    plan.used_temps.push_back(temps.fresh[base]);
  }

  auto substituted = [&](const Node& stmt) {
    return clone_with(stmt, [&](const Node& n) -> NodePtr {
      auto it = by_node.find(&n);
      return it == by_node.end() ? nullptr : make_name(it->second);
    });
  };

  std::vector<NodePtr> rhs = instantiate_rhs(rule, b, temps);
  bool expression_level = b.anchor != nullptr;
  bool branched = !guards.empty();
  const Node& first = *window.front();
  bool want_res = keep_value && expression_level && branched && first.kind == NodeKind::Expr;
  std::string res = want_res ? pool.fresh("res") : std::string();
  if (want_res) plan.used_temps.push_back(res);

  auto as_result = [&](NodePtr stmt) {
    if (!want_res) return stmt;
    return assign(make_name(res), std::move(stmt->kids[0]));
  };

  std::vector<NodePtr> then_branch;
  if (expression_level) {
    NodePtr value = std::move(rhs.back()->kids[0]);
    rhs.pop_back();
    for (auto& s : rhs) then_branch.push_back(std::move(s));
    auto replaced = clone_with(first, [&](const Node& n) -> NodePtr {
      if (&n != b.anchor) return nullptr;
      return std::move(value);
    });
    then_branch.push_back(as_result(std::move(replaced)));
  } else {
    then_branch = std::move(rhs);
  }

  for (const auto& [temp, node] : plan.guard.hoisted) plan.replacement.push_back(assign(make_name(temp), clone(*node, true)));

  std::vector<NodePtr> imports;
  for (const auto& [base, module] : kModules)
    if (auto it = temps.fresh.find(std::string(base)); it != temps.fresh.end())
      imports.push_back(import_as(module, it->second));

  if (!branched) {
    for (auto& i : imports) plan.replacement.push_back(std::move(i));
    for (auto& s : then_branch) plan.replacement.push_back(std::move(s));
    plan.guard_summary = "none";
    return plan;
  }

  auto cond = make_node(NodeKind::BoolOp);
  cond->text = "and";
  for (const Node* g : guards) {
    auto inst = instantiate_expr(*g, b, temps);
    if (inst->kind == NodeKind::BoolOp && inst->text == "and") {
      for (auto& v : inst->kids) cond->kids.push_back(std::move(v));
    } else {
      cond->kids.push_back(std::move(inst));
    }
  }
  if (cond->kids.size() == 1) cond = std::move(cond->kids[0]);
  plan.guard_summary = unparse_expr(*cond);
  plan.guard.condition = clone(*cond);

  std::string ok = pool.fresh("ok");
  plan.used_temps.push_back(ok);

  auto try_stmt = make_node(NodeKind::Try);
  std::vector<NodePtr> body = std::move(imports);
  body.push_back(assign(make_name(ok), std::move(cond)));
  auto handler = make_node(NodeKind::ExceptHandler);
  handler->kids.push_back(make_name("Exception"));
  std::vector<NodePtr> hbody;
  hbody.push_back(assign(make_name(ok), false_const()));
  handler->kids.push_back(make_seq(std::move(hbody)));
  std::vector<NodePtr> handlers;
  handlers.push_back(std::move(handler));
  try_stmt->kids.push_back(make_seq(std::move(body)));
  try_stmt->kids.push_back(make_seq(std::move(handlers)));
  try_stmt->kids.push_back(make_seq());
  try_stmt->kids.push_back(make_seq());
  plan.replacement.push_back(std::move(try_stmt));

  std::vector<NodePtr> else_branch;
  for (const Node* s : window) {
    auto c = substituted(*s);
    else_branch.push_back(want_res ? as_result(std::move(c)) : std::move(c));
  }

  auto ifs = make_node(NodeKind::If);
  ifs->kids.push_back(make_name(ok));
  ifs->kids.push_back(make_seq(std::move(then_branch)));
  ifs->kids.push_back(make_seq(std::move(else_branch)));
  plan.replacement.push_back(std::move(ifs));
  if (want_res) plan.replacement.push_back(expr_stmt(make_name(res)));
  return plan;
}

void check_plan_invariants(const RewritePlan& plan) {
  std::vector<const Node*> repl;
  for (const auto& s : plan.replacement) repl.push_back(s.get());

  // Replacement validity.
  std::string text = unparse_statements(repl);
  auto reparsed = parse_module(text);
  if (!ok(reparsed)) throw InvariantViolation(plan.rule_id + ": replacement does not parse");
  if (unparse(std::get<Module>(reparsed)) != text) throw InvariantViolation(plan.rule_id + ": replacement is not stable");

  // Single evaluation.
  for (const auto& [temp, node] : plan.guard.hoisted) {
    std::size_t in_window = 0;
    for (const Node* s : plan.original) in_window += count_equal(*s, *node);
    std::size_t in_region = 0;
    if (plan.anchor) in_region = count_equal(*plan.anchor, *node);
    else in_region = in_window;
    std::size_t expected = in_window + (in_window - in_region);
    std::size_t actual = 0;
    for (const Node* s : repl) actual += count_equal(*s, *node);
    if (actual != expected)
      throw InvariantViolation(plan.rule_id + ": hoisted expression '" + unparse_expr(*node) + "' evaluated " +
                               std::to_string(actual) + " times, expected " + std::to_string(expected));
    std::size_t defs = 0;
    for (const Node* s : repl)
      if (s->kind == NodeKind::Assign && s->kid(0)->kids.size() == 1 && s->kid(0)->kid(0)->kind == NodeKind::Name &&
          s->kid(0)->kid(0)->text == temp)
        ++defs;
    if (defs != 1) throw InvariantViolation(plan.rule_id + ": temporary '" + temp + "' not assigned exactly once");
  }

  // Branch completeness.
  auto original = visible(assigned_names(plan.original));
  const Node* branch = nullptr;
  for (const Node* s : repl)
    if (s->kind == NodeKind::If) branch = s;
  if (!plan.guard.condition) {
    if (visible(assigned_names(repl)) != original) throw InvariantViolation(plan.rule_id + ": assigned names differ");
    return;
  }
  if (!branch) throw InvariantViolation(plan.rule_id + ": guarded plan without branch");
  auto then_names = visible(assigned_names(seq_items(*branch->kid(1))));
  auto else_names = visible(assigned_names(seq_items(*branch->kid(2))));
  if (then_names != else_names || then_names != original)
    throw InvariantViolation(plan.rule_id + ": branches assign different names");
}

}  // namespace cellrw::transform
