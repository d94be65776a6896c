#include "cellrw/transform/classify.hpp"

#include <cctype>
#include <cstdlib>
#include <functional>
#include <map>

#include "cellrw/syntax/parser.hpp"
#include "cellrw/syntax/unparse.hpp"

namespace cellrw::transform {

using namespace syntax;

std::string_view classification_name(FunctionClassification::Kind k) {
  switch (k) {
    case FunctionClassification::Kind::ColumnMathOnly: return "ColumnMathOnly";
    case FunctionClassification::Kind::IfElseVectorizable: return "IfElseVectorizable";
    case FunctionClassification::Kind::SubstringSearch: return "SubstringSearch";
    case FunctionClassification::Kind::Unknown: return "Unknown";
  }
  return "Unknown";
}

namespace {

using Kind = FunctionClassification::Kind;

// row['K'] with a string key.
const Node* column_key(const Node& e, std::string_view row) {
  if (e.kind != NodeKind::Subscript) return nullptr;
  const Node* v = e.kid(0);
  const Node* k = e.kid(1);
  if (v->kind != NodeKind::Name || v->text != row) return nullptr;
  if (k->kind != NodeKind::Constant || k->constant != ConstKind::Str) return nullptr;
  return k;
}

bool is_arith_op(std::string_view op) {
  return op == "+" || op == "-" || op == "*" || op == "/" || op == "//" || op == "%" || op == "**";
}

// Integer arrays reject negative integer powers, so only constant exponents
// that are non-negative ints or floats are accepted.
bool safe_exponent(const Node& e) {
  const Node* c = &e;
  bool negated = false;
  if (e.kind == NodeKind::UnaryOp && (e.text == "-" || e.text == "+")) {
    negated = e.text == "-";
    c = e.kid(0);
  }
  if (c->kind != NodeKind::Constant) return false;
  return c->constant == ConstKind::Float || (c->constant == ConstKind::Int && !negated);
}

struct ArithCheck {
  std::string_view row;
  const std::set<std::string>& locals;
  std::set<std::string>& columns;
  bool uses_column = false;

  bool ok(const Node& e) {
    switch (e.kind) {
      case NodeKind::BinOp:
        if (e.text == "**") return ok(*e.kid(0)) && safe_exponent(*e.kid(1));
        return is_arith_op(e.text) && ok(*e.kid(0)) && ok(*e.kid(1));
      case NodeKind::UnaryOp: return (e.text == "-" || e.text == "+") && ok(*e.kid(0));
      case NodeKind::Constant: return e.constant == ConstKind::Int || e.constant == ConstKind::Float;
      case NodeKind::Name:
        if (e.text == row) return false;
        if (locals.count(e.text)) uses_column = true;
        return true;
      case NodeKind::Subscript:
        if (const Node* k = column_key(e, row)) {
          columns.insert(k->text);
          uses_column = true;
          return true;
        }
        return false;
      default: return false;
    }
  }
};

// The body of a def without a leading docstring.
std::vector<const Node*> effective_body(const Node& def) {
  std::vector<const Node*> out;
  const auto& body = def.kid(3)->kids;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const Node& s = *body[i];
    if (i == 0 && s.kind == NodeKind::Expr && s.kid(0)->kind == NodeKind::Constant &&
        s.kid(0)->constant == ConstKind::Str)
      continue;
    out.push_back(&s);
  }
  return out;
}

std::string check_signature(const Node& fn, std::string_view row) {
  const Node* a = fn.kind == NodeKind::Lambda ? fn.kid(0) : fn.kid(1);
  std::vector<const Node*> positional;
  for (const auto& p : a->kid(0)->kids) positional.push_back(p.get());
  for (const auto& p : a->kid(1)->kids) positional.push_back(p.get());
  if (positional.empty() || positional[0]->text != row) return "first parameter is not the row";
  if (a->kid(2) || a->kid(5)) return "variadic parameters";
  if (a->kid(6)->kids.size() + 1 < positional.size()) return "extra parameter without default";
  for (const auto& d : a->kid(4)->kids)
    if (!d) return "keyword-only parameter without default";
  if (fn.kind == NodeKind::FunctionDef) {
    if (fn.flag) return "async function";
    if (!fn.kid(0)->kids.empty()) return "decorated function";
  }
  return {};
}

int constant_group(const Node& c) {
  if (c.kind != NodeKind::Constant) return -1;
  switch (c.constant) {
    case ConstKind::Str: return 0;
    case ConstKind::Int: return 1;
    case ConstKind::Float: return 2;
    case ConstKind::True:
    case ConstKind::False: return 3;
    default: return -1;
  }
}

const Node* returned_constant_stmt(const Node& s) {
  if (s.kind != NodeKind::Return || !s.kid(0) || constant_group(*s.kid(0)) < 0) return nullptr;
  return s.kid(0);
}

const Node* returned_constant(const Node& seq) {
  return seq.kids.size() == 1 ? returned_constant_stmt(*seq.kid(0)) : nullptr;
}

bool is_substring_test(const Node& e, std::string_view row, std::string& needle) {
  if (e.kind != NodeKind::Compare || e.ops.size() != 1 || e.ops[0] != "in") return false;
  const Node* l = e.kid(0);
  const Node* r = e.kid(1);
  if (l->kind != NodeKind::Constant || l->constant != ConstKind::Str) return false;
  if (r->kind != NodeKind::Name || r->text != row) return false;
  needle = l->text;
  return true;
}

FunctionClassification unknown(std::string reason) {
  FunctionClassification c;
  c.reason = std::move(reason);
  return c;
}

}  // namespace

FunctionClassification classify_apply_target(const Node& fn, std::string_view row) {
  if (fn.kind != NodeKind::FunctionDef && fn.kind != NodeKind::Lambda) return unknown("not a function");
  if (auto why = check_signature(fn, row); !why.empty()) return unknown(why);

  FunctionClassification c;
  if (fn.kind == NodeKind::Lambda) {
    const Node& body = *fn.kid(1);
    if (is_substring_test(body, row, c.needle)) {
      c.kind = Kind::SubstringSearch;
      return c;
    }
    std::set<std::string> none;
    ArithCheck ac{row, none, c.columns};
    if (ac.ok(body) && ac.uses_column) {
      c.kind = Kind::ColumnMathOnly;
      return c;
    }
    return unknown("lambda body is not column arithmetic");
  }

  auto body = effective_body(fn);
  if (body.empty()) return unknown("empty body");

  // Column arithmetic: extractions then one return.
  if (body.back()->kind == NodeKind::Return && body.back()->kid(0)) {
    std::set<std::string> locals;
    std::set<std::string> cols;
    bool shape_ok = true;
    for (std::size_t i = 0; i + 1 < body.size() && shape_ok; ++i) {
      const Node& s = *body[i];
      shape_ok = s.kind == NodeKind::Assign && s.kid(0)->kids.size() == 1 && s.kid(0)->kid(0)->kind == NodeKind::Name &&
                 s.kid(0)->kid(0)->text != row;
      if (!shape_ok) break;
      const Node* key = column_key(*s.kid(1), row);
      shape_ok = key != nullptr;
      if (shape_ok) {
        cols.insert(key->text);
        locals.insert(s.kid(0)->kid(0)->text);
      }
    }
    if (shape_ok) {
      std::string needle;
      if (body.size() == 1 && is_substring_test(*body.back()->kid(0), row, needle)) {
        c.kind = Kind::SubstringSearch;
        c.needle = needle;
        return c;
      }
      ArithCheck ac{row, locals, cols};
      if (ac.ok(*body.back()->kid(0)) && ac.uses_column) {
        c.kind = Kind::ColumnMathOnly;
        c.columns = std::move(cols);
        return c;
      }
    }
  }

  // If/elif/else chain of constant returns, or a chain without else followed
  // by a constant return.
  const Node* fallthrough = body.size() == 2 ? returned_constant_stmt(*body[1]) : nullptr;
  if ((body.size() == 1 || fallthrough) && body[0]->kind == NodeKind::If) {
    const Node* cur = body[0];
    int group = -1;
    auto same_group = [&](const Node* v) {
      int g = constant_group(*v);
      if (group < 0) group = g;
      return g == group;
    };
    while (true) {
      const Node* v = returned_constant(*cur->kid(1));
      if (!v) return unknown("branch does not return a constant");
      if (!same_group(v)) return unknown("branch constants differ in type");
      VectorizeNeeds needs;
      auto frame = make_name("df");
      if (!vectorize_condition(*cur->kid(0), row, *frame, &needs)) return unknown("untranslatable condition");
      c.columns.insert(needs.columns.begin(), needs.columns.end());
      c.branches.push_back({cur->kid(0), v});
      const Node* orelse = cur->kid(2);
      if (orelse->kids.size() == 1 && orelse->kid(0)->kind == NodeKind::If) {
        cur = orelse->kid(0);
        continue;
      }
      const Node* d = orelse->kids.empty() ? fallthrough : returned_constant(*orelse);
      if (!d || (fallthrough && !orelse->kids.empty())) return unknown("chain has no constant else");
      if (!same_group(d)) return unknown("branch constants differ in type");
      c.default_value = d;
      break;
    }
    c.kind = Kind::IfElseVectorizable;
    return c;
  }
  return unknown("unsupported body shape");
}

namespace {

class Vectorizer {
 public:
  Vectorizer(std::string_view row, const Node& frame, VectorizeNeeds* needs) : row_(row), frame_(frame), needs_(needs) {}

  NodePtr cond(const Node& e) {
    switch (e.kind) {
      case NodeKind::BoolOp: {
        NodePtr acc;
        for (const auto& v : e.kids) {
          auto t = cond(*v);
          if (!t) return nullptr;
          acc = acc ? binop(e.text == "and" ? "&" : "|", std::move(acc), std::move(t)) : std::move(t);
        }
        return acc;
      }
      case NodeKind::UnaryOp: {
        if (e.text != "not") return nullptr;
        auto t = cond(*e.kid(0));
        return t ? invert(std::move(t)) : nullptr;
      }
      case NodeKind::Compare: return compare(e);
      case NodeKind::Call: return str_method(e);
      default: return nullptr;
    }
  }

 private:
  NodePtr column(const std::string& key) {
    if (needs_) needs_->columns.insert(key);
    auto s = make_node(NodeKind::Subscript);
    s->kids.push_back(clone(frame_, true));
    s->kids.push_back(make_str(key));
    return s;
  }

  static NodePtr binop(std::string op, NodePtr l, NodePtr r) {
    auto n = make_node(NodeKind::BinOp);
    n->text = std::move(op);
    n->kids.push_back(std::move(l));
    n->kids.push_back(std::move(r));
    return n;
  }

  static NodePtr invert(NodePtr x) {
    auto n = make_node(NodeKind::UnaryOp);
    n->text = "~";
    n->kids.push_back(std::move(x));
    return n;
  }

  static NodePtr method_call(NodePtr receiver, std::string name, NodePtr arg) {
    auto attr = make_node(NodeKind::Attribute);
    attr->text = std::move(name);
    attr->kids.push_back(std::move(receiver));
    auto call = make_node(NodeKind::Call);
    call->kids.push_back(std::move(attr));
    std::vector<NodePtr> args;
    args.push_back(std::move(arg));
    call->kids.push_back(make_seq(std::move(args)));
    call->kids.push_back(make_seq());
    return call;
  }

  // Operand of a comparison: column, constant or free name.
  NodePtr value(const Node& e, bool& is_column) {
    is_column = false;
    if (const Node* k = column_key(e, row_)) {
      is_column = true;
      return column(k->text);
    }
    if (e.kind == NodeKind::Constant && constant_group(e) >= 0) return clone(e, true);
    if (e.kind == NodeKind::Name && e.text != row_) return clone(e, true);
    return nullptr;
  }

  NodePtr container(const Node& e) {
    if (e.kind == NodeKind::List || e.kind == NodeKind::Tuple || e.kind == NodeKind::Set) {
      for (const auto& k : e.kids)
        if (constant_group(*k) < 0) return nullptr;
      return clone(e, true);
    }
    if (e.kind == NodeKind::Name && e.text != row_) {
      if (needs_) needs_->containers.insert(e.text);
      return clone(e, true);
    }
    return nullptr;
  }

  NodePtr compare(const Node& e) {
    NodePtr acc;
    for (std::size_t i = 0; i < e.ops.size(); ++i) {
      const Node& l = *e.kid(i);
      const Node& r = *e.kid(i + 1);
      const std::string& op = e.ops[i];
      NodePtr part;
      if (op == "in" || op == "not in") {
        const Node* k = column_key(l, row_);
        if (!k) return nullptr;
        auto c = container(r);
        if (!c) return nullptr;
        part = method_call(column(k->text), "isin", std::move(c));
        if (op == "not in") part = invert(std::move(part));
      } else if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") {
        bool lc = false;
        bool rc = false;
        auto lv = value(l, lc);
        auto rv = value(r, rc);
        if (!lv || !rv || !(lc || rc)) return nullptr;
        part = make_node(NodeKind::Compare);
        part->ops.push_back(op);
        part->kids.push_back(std::move(lv));
        part->kids.push_back(std::move(rv));
      } else {
        return nullptr;
      }
      acc = acc ? binop("&", std::move(acc), std::move(part)) : std::move(part);
    }
    return acc;
  }

  NodePtr str_method(const Node& e) {
    const Node* f = e.kid(0);
    if (f->kind != NodeKind::Attribute || (f->text != "startswith" && f->text != "endswith")) return nullptr;
    const Node* k = column_key(*f->kid(0), row_);
    if (!k || e.kid(1)->kids.size() != 1 || !e.kid(2)->kids.empty()) return nullptr;
    const Node* arg = e.kid(1)->kid(0);
    if (arg->kind != NodeKind::Constant || arg->constant != ConstKind::Str) return nullptr;
    if (needs_) needs_->str_columns.insert(k->text);
    auto str = make_node(NodeKind::Attribute);
    str->text = "str";
    str->kids.push_back(column(k->text));
    return method_call(std::move(str), f->text, clone(*arg, true));
  }

  std::string_view row_;
  const Node& frame_;
  VectorizeNeeds* needs_;
};

}  // namespace

std::optional<NodePtr> vectorize_condition(const Node& cond, std::string_view row_param, const Node& frame,
                                           VectorizeNeeds* needs) {
  Vectorizer v(row_param, frame, needs);
  auto out = v.cond(cond);
  if (!out) return std::nullopt;
  return out;
}

namespace {

bool nonzero_number(const Node& c) {
  if (c.kind != NodeKind::Constant) return false;
  std::string t;
  for (char ch : c.text)
    if (ch != '_') t += ch;
  if (c.constant == ConstKind::Float) return std::strtod(t.c_str(), nullptr) != 0.0;
  if (c.constant != ConstKind::Int) return false;
  std::size_t start = t.size() > 1 && t[0] == '0' && std::isalpha(static_cast<unsigned char>(t[1])) ? 2 : 0;
  return t.find_first_not_of('0', start) != std::string::npos;
}

}  // namespace

std::optional<ArithmeticHazards> arithmetic_hazards(const Node& def, std::string_view row, const Node& frame,
                                                    std::string_view fun) {
  if (def.kind != NodeKind::FunctionDef) return std::nullopt;
  auto body = effective_body(def);
  if (body.empty() || body.back()->kind != NodeKind::Return || !body.back()->kid(0)) return std::nullopt;

  auto column_of = [&](const std::string& key) {
    auto s = make_node(NodeKind::Subscript);
    s->kids.push_back(clone(frame, true));
    s->kids.push_back(make_str(key));
    return s;
  };
  auto parsed = [](const std::string& text) -> NodePtr {
    auto r = parse_expression(text, true);
    return std::holds_alternative<NodePtr>(r) ? std::move(std::get<NodePtr>(r)) : nullptr;
  };

  std::map<std::string, NodePtr> subst;
  std::map<std::string, std::string> local_column;
  const Node* a = def.kid(1);
  std::vector<const Node*> positional;
  for (const auto& p : a->kid(0)->kids) positional.push_back(p.get());
  for (const auto& p : a->kid(1)->kids) positional.push_back(p.get());
  const auto& defaults = a->kid(6)->kids;
  std::size_t first_default = positional.size() - defaults.size();
  for (std::size_t i = first_default; i < positional.size(); ++i)
    subst[positional[i]->text] = parsed(std::string(fun) + ".__defaults__[" + std::to_string(i - first_default) + "]");
  for (const auto& p : a->kid(3)->kids)
    subst[p->text] = parsed(std::string(fun) + ".__kwdefaults__[" + repr_str(p->text) + "]");
  for (std::size_t i = 0; i + 1 < body.size(); ++i) {
    const Node& st = *body[i];
    const Node* key = st.kind == NodeKind::Assign ? column_key(*st.kid(1), row) : nullptr;
    if (!key) return std::nullopt;
    subst[st.kid(0)->kid(0)->text] = column_of(key->text);
    local_column[st.kid(0)->kid(0)->text] = key->text;
  }

  std::function<NodePtr(const Node&)> over_frame = [&](const Node& n) -> NodePtr {
    if (const Node* k = column_key(n, row)) return column_of(k->text);
    if (n.kind == NodeKind::Name) {
      auto it = subst.find(n.text);
      return it == subst.end() ? clone(n, true) : clone(*it->second, true);
    }
    auto c = clone(n, true);
    for (std::size_t i = 0; i < n.kids.size(); ++i)
      if (n.kids[i]) c->kids[i] = over_frame(*n.kids[i]);
    return c;
  };

  ArithmeticHazards out;
  walk(*body.back()->kid(0), [&](const Node& n) {
    if (const Node* k = column_key(n, row)) out.columns.insert(k->text);
    if (n.kind == NodeKind::Name && local_column.count(n.text)) out.columns.insert(local_column[n.text]);
    if (n.kind != NodeKind::BinOp) return;
    if (n.text == "**") out.power = true;
    if (n.text != "/" && n.text != "//" && n.text != "%") return;
    if (!nonzero_number(*n.kid(1))) out.divisors.push_back(over_frame(*n.kid(1)));
  });
  for (const auto& d : out.divisors)
    if (!d) return std::nullopt;
  return out;
}

}  // namespace cellrw::transform
