#include "cellrw/rules/matcher.hpp"

#include "cellrw/syntax/names.hpp"

namespace cellrw::rules {

using namespace syntax;

namespace {

bool hole_accepts(HoleKind k, const Node& s) {
  switch (k) {
    case HoleKind::Expr: return is_expression(s.kind) && s.kind != NodeKind::Starred;
    case HoleKind::Name:
    case HoleKind::FuncName: return s.kind == NodeKind::Name;
    case HoleKind::ConstantInt: return s.kind == NodeKind::Constant && s.constant == ConstKind::Int;
    case HoleKind::ConstantStr: return s.kind == NodeKind::Constant && s.constant == ConstKind::Str;
    case HoleKind::Lambda: return s.kind == NodeKind::Lambda;
  }
  return false;
}

class Matcher {
 public:
  Matcher(const RuleForm& form, Bindings& b) : form_(form), b_(b) {}

  bool match(const Node* t, const Node* s) {
    if (!t || !s) return t == s;
    if (t->kind == NodeKind::Hole) return bind(*t->hole, s);
    if (t->kind == NodeKind::Arg && t->hole) {
      if (s->kind != NodeKind::Arg || s->kid(0)) return false;
      auto name = std::shared_ptr<Node>(make_name(s->text));
      name->span = s->span;
      b_.owned.push_back(name);
      return bind(*t->hole, name.get());
    }
    if (t->kind == NodeKind::Call && s->kind == NodeKind::Call) {
      auto sig = form_.signatures.find(callee_name(*t));
      if (sig != form_.signatures.end()) return match_normalized(*t, *s, sig->second);
    }
    if (t->kind != s->kind || t->text != s->text || t->constant != s->constant || t->flag != s->flag ||
        t->level != s->level || t->ops != s->ops || s->hole || t->kids.size() != s->kids.size())
      return false;
    if (t->kind == NodeKind::Alias && t->text2 != s->text2) return false;
    for (std::size_t i = 0; i < t->kids.size(); ++i)
      if (!match(t->kid(i), s->kid(i))) return false;
    return true;
  }

 private:
  bool bind(const HoleSpec& h, const Node* s) {
    if (h.reference) {
      const Node* prev = b_.get(h.binder);
      return prev && structurally_equal(prev, s);
    }
    if (!hole_accepts(h.kind, *s)) return false;
    if (!h.binder.empty()) b_.frags[h.binder] = s;
    return true;
  }

  bool match_normalized(const Node& t, const Node& s, const Signature& sig) {
    if (callee_name(t) != callee_name(s)) return false;
    auto ta = normalize_call(t, sig);
    auto sa = normalize_call(s, sig);
    if (!ta || !sa) return false;
    if (!match(t.kid(0), s.kid(0))) return false;
    for (std::size_t i = 0; i < ta->size(); ++i)
      if (!match((*ta)[i], (*sa)[i])) return false;
    return true;
  }

  const RuleForm& form_;
  Bindings& b_;
};

void add_sites(const Node* e, std::vector<const Node*>& out) {
  while (e) {
    out.push_back(e);
    switch (e->kind) {
      case NodeKind::Call: {
        const Node* f = e->kid(0);
        if (f->kind == NodeKind::Name) {
          const Node* args = e->kid(1);
          e = !args->kids.empty() && args->kid(0)->kind != NodeKind::Starred ? args->kid(0) : nullptr;
        } else if (f->kind == NodeKind::Attribute && f->kid(0)->kind == NodeKind::Name) {
          // name.method(arg, ...): the receiver is a bare name, so follow the first argument.
          const Node* args = e->kid(1);
          e = !args->kids.empty() && args->kid(0)->kind != NodeKind::Starred ? args->kid(0) : nullptr;
        } else if (f->kind == NodeKind::Attribute) {
          e = f->kid(0);
        } else {
          e = nullptr;
        }
        break;
      }
      case NodeKind::Attribute:
      case NodeKind::Subscript: e = e->kid(0); break;
      default: e = nullptr;
    }
  }
}

bool anchor_present(const Anchor& a, const std::vector<const Node*>& calls) {
  for (const Node* c : calls) {
    if (callee_name(*c) != a.callee) continue;
    if (!a.arg0) return true;
    const Node* first = nullptr;
    if (!c->kid(1)->kids.empty()) {
      first = c->kid(1)->kid(0);
    } else if (!a.arg0_keyword.empty()) {
      for (const auto& k : c->kid(2)->kids)
        if (k->text == a.arg0_keyword) first = k->kid(0);
    }
    if (first && first->kind == *a.arg0) return true;
  }
  return false;
}

std::vector<const Node*> calls_in(const Node& stmt) {
  std::vector<const Node*> calls;
  walk(stmt, [&](const Node& n) {
    if (n.kind == NodeKind::Call) calls.push_back(&n);
  });
  return calls;
}

std::vector<std::size_t> dispatch_indices(const Node& stmt, const Registry& reg) {
  std::vector<std::size_t> out;
  auto calls = calls_in(stmt);
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (!reg.enabled(i)) continue;
    for (const auto& f : reg[i].forms) {
      if (!f.anchor || anchor_present(*f.anchor, calls)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

// Visits structural matches of one form; `accept` returns true to stop.
template <typename Fn>
bool each_match(const RewriteRule& rule, std::size_t form_index, const std::vector<const Node*>& stmts,
                std::size_t start, Fn&& accept) {
  const RuleForm& form = rule.forms[form_index];
  const auto& lhs = form.lhs;
  if (start + lhs.statement_arity() > stmts.size()) return false;
  auto fresh = [&] {
    Bindings b;
    b.form = form_index;
    b.matched_span = {start, lhs.statement_arity()};
    b.window.assign(stmts.begin() + static_cast<std::ptrdiff_t>(start),
                    stmts.begin() + static_cast<std::ptrdiff_t>(start + lhs.statement_arity()));
    return b;
  };
  if (lhs.level == PatternLevel::Statement) {
    Bindings b = fresh();
    Matcher m(form, b);
    for (std::size_t k = 0; k < lhs.stmts.size(); ++k)
      if (!m.match(lhs.stmts[k].get(), stmts[start + k])) return false;
    return accept(std::move(b));
  }
  for (const Node* site : expression_sites(*stmts[start])) {
    Bindings b = fresh();
    Matcher m(form, b);
    if (!m.match(lhs.root_expr(), site)) continue;
    b.anchor = site;
    if (accept(std::move(b))) return true;
  }
  return false;
}

bool line_isolated(const Node& stmt, std::string_view src) {
  if (src.empty()) return true;
  if (!stmt.span.valid() || stmt.span.end > src.size()) return false;
  for (std::size_t i = stmt.span.begin; i-- > 0;) {
    char c = src[i];
    if (c == '\n' || c == '\r') break;
    if (c != ' ' && c != '\t' && c != '\f') return false;
  }
  for (std::size_t i = stmt.span.end; i < src.size(); ++i) {
    char c = src[i];
    if (c == '\n' || c == '\r' || c == '#') break;
    if (c != ' ' && c != '\t' && c != '\f') return false;
  }
  return true;
}

bool is_simple(NodeKind k) {
  switch (k) {
    case NodeKind::Expr:
    case NodeKind::Assign:
    case NodeKind::AugAssign:
    case NodeKind::AnnAssign:
    case NodeKind::Return:
    case NodeKind::Delete:
    case NodeKind::Raise:
    case NodeKind::Assert: return true;
    default: return false;
  }
}

class Scanner {
 public:
  Scanner(const Registry& reg, const MatchContext& ctx) : reg_(reg), ctx_(ctx) {
    sentinel_possible_ = ctx.source.empty() || ctx.source.find(kReservedPrefix) != std::string_view::npos;
  }

  void scan(const std::vector<const Node*>& stmts, int depth, std::size_t top) {
    for (std::size_t i = 0; i < stmts.size(); ++i) {
      const Node& stmt = *stmts[i];
      std::size_t ti = depth == 0 ? i : top;
      if (sentinel_possible_ && contains_sentinel(stmt)) continue;
      if (is_simple(stmt.kind)) {
        if (auto used = try_rules(stmts, i, depth, ti)) i += used - 1;
        continue;
      }
      if (stmt.kind == NodeKind::ClassDef) continue;
      for (const Node* body : nested_bodies(stmt)) {
        std::vector<const Node*> inner;
        for (const auto& s : body->kids) inner.push_back(s.get());
        scan(inner, depth + 1, ti);
      }
    }
  }

  std::vector<ScanMatch> take() { return std::move(out_); }

 private:
  std::size_t try_rules(const std::vector<const Node*>& stmts, std::size_t i, int depth, std::size_t ti) {
    if (!line_isolated(*stmts[i], ctx_.source)) return 0;
    for (std::size_t r : dispatch_indices(*stmts[i], reg_)) {
      const RewriteRule& rule = reg_[r];
      for (std::size_t f = 0; f < rule.forms.size(); ++f) {
        bool found = each_match(rule, f, stmts, i, [&](Bindings b) {
          for (std::size_t k = 1; k < b.matched_span.length; ++k) {
            const Node& s = *stmts[i + k];
            if ((sentinel_possible_ && contains_sentinel(s)) || !line_isolated(s, ctx_.source)) return false;
          }
          if (!check_syntactic(rule, b)) return false;
          if (rule.forms[f].rhs.deferred()) {
            auto syn = rule.forms[f].rhs.synthesize(b, ctx_, ti);
            if (!syn) return false;
            b.synthesis = std::make_shared<const Synthesis>(std::move(*syn));
          }
          out_.push_back({rule.id, r, std::move(b), ti, depth});
          return true;
        });
        if (found) return out_.back().bindings.matched_span.length;
      }
    }
    return 0;
  }

  const Registry& reg_;
  const MatchContext& ctx_;
  bool sentinel_possible_ = true;
  std::vector<ScanMatch> out_;
};

}  // namespace

std::vector<const Node*> expression_sites(const Node& stmt) {
  std::vector<const Node*> out;
  const Node* root = nullptr;
  switch (stmt.kind) {
    case NodeKind::Expr:
    case NodeKind::Return: root = stmt.kid(0); break;
    case NodeKind::Assign: root = stmt.kid(1); break;
    case NodeKind::AnnAssign: root = stmt.kid(2); break;
    default: break;
  }
  add_sites(root, out);
  return out;
}

std::vector<std::string> dispatch(const Node& stmt, const Registry& registry) {
  std::vector<std::string> ids;
  for (std::size_t i : dispatch_indices(stmt, registry)) ids.push_back(registry[i].id);
  return ids;
}

std::optional<Bindings> match_window(const RewriteRule& rule, const std::vector<const Node*>& stmts, std::size_t start) {
  std::optional<Bindings> found;
  for (std::size_t f = 0; f < rule.forms.size() && !found; ++f)
    each_match(rule, f, stmts, start, [&](Bindings b) {
      found = std::move(b);
      return true;
    });
  return found;
}

bool check_syntactic(const RewriteRule& rule, const Bindings& b) {
  for (const auto& p : rule.forms[b.form].sprecs)
    if (!p.holds(b)) return false;
  return true;
}

std::vector<ScanMatch> scan_cell(const std::vector<const Node*>& stmts, const Registry& registry,
                                 const MatchContext& ctx) {
  Scanner s(registry, ctx);
  s.scan(stmts, 0, 0);
  return s.take();
}

}  // namespace cellrw::rules
