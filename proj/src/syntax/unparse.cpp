#include "cellrw/syntax/unparse.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>

#include "literal.hpp"

namespace cellrw::syntax {

namespace {

enum class Prec : int {
  NamedExpr,
  Tuple,
  Yield,
  Test,
  Or,
  And,
  Not,
  Cmp,
  Expr,
  BOr = Expr,
  BXor,
  BAnd,
  Shift,
  Arith,
  Term,
  Factor,
  Power,
  Await,
  Atom,
};

Prec next(Prec p) { return p == Prec::Atom ? p : static_cast<Prec>(static_cast<int>(p) + 1); }

Prec binop_prec(std::string_view op) {
  if (op == "+" || op == "-") return Prec::Arith;
  if (op == "*" || op == "@" || op == "/" || op == "%" || op == "//") return Prec::Term;
  if (op == "<<" || op == ">>") return Prec::Shift;
  if (op == "|") return Prec::BOr;
  if (op == "^") return Prec::BXor;
  if (op == "&") return Prec::BAnd;
  return Prec::Power;
}

std::string hex(char32_t v, int width) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s(static_cast<std::size_t>(width), '0');
  for (int i = width - 1; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = kDigits[v & 0xF];
  return s;
}

std::string unicode_escape(char32_t cp) {
  switch (cp) {
    case '\\': return "\\\\";
    case '\t': return "\\t";
    case '\n': return "\\n";
    case '\r': return "\\r";
    default: break;
  }
  if (cp < 0x100) return "\\x" + hex(cp, 2);
  if (cp < 0x10000) return "\\u" + hex(cp, 4);
  return "\\U" + hex(cp, 8);
}

constexpr std::array<std::string_view, 2> kMultiQuotes = {"\"\"\"", "'''"};

// Port of _Unparser._str_literal_helper for docstrings.
std::string docstring_literal(std::string_view value) {
  std::string escaped;
  for (std::size_t i = 0; i < value.size();) {
    std::size_t start = i;
    char32_t cp = detail::next_code_point(value, i);
    if (cp == '\n' || cp == '\t') {
      escaped.push_back(static_cast<char>(cp));
    } else if (cp == '\\' || !detail::is_printable(cp)) {
      escaped += unicode_escape(cp);
    } else {
      escaped.append(value.substr(start, i - start));
    }
  }
  std::vector<std::string_view> quotes;
  for (auto q : kMultiQuotes)
    if (escaped.find(q) == std::string::npos) quotes.push_back(q);
  if (quotes.empty()) {
    std::string r = repr_str(value);
    std::string_view q = r[0] == '"' ? kMultiQuotes[0] : kMultiQuotes[1];
    return std::string(q) + r.substr(1, r.size() - 2) + std::string(q);
  }
  if (!escaped.empty()) {
    std::stable_sort(quotes.begin(), quotes.end(),
                     [&](std::string_view a, std::string_view b) {
                       return (a[0] == escaped.back()) < (b[0] == escaped.back());
                     });
    if (quotes[0][0] == escaped.back()) escaped.insert(escaped.size() - 1, "\\");
  }
  return std::string(quotes[0]) + escaped + std::string(quotes[0]);
}

std::string float_text(const std::string& repr) {
  std::string out;
  for (std::size_t i = 0; i < repr.size();) {
    if (repr.compare(i, 3, "inf") == 0) {
      out += "1e309";
      i += 3;
    } else if (repr.compare(i, 3, "nan") == 0) {
      out += "(1e309-1e309)";
      i += 3;
    } else {
      out.push_back(repr[i++]);
    }
  }
  return out;
}

class Unparser {
 public:
  Unparser(std::string_view base, std::string_view newline) : base_(base), nl_(newline) {}

  std::string take() { return std::move(out_); }

  void stmts(const std::vector<const Node*>& list) {
    for (const Node* s : list) traverse(*s);
  }

  void body_with_docstring(const std::vector<NodePtr>& body) {
    std::size_t start = 0;
    if (!body.empty() && is_docstring(*body[0])) {
      fill();
      out_ += docstring_literal(body[0]->kid(0)->text);
      start = 1;
    }
    for (std::size_t i = start; i < body.size(); ++i) traverse(*body[i]);
  }

  void traverse(const Node& n) {
    switch (n.kind) {
      case NodeKind::Module: body_with_docstring(n.kids); break;
      case NodeKind::Seq:
        for (const auto& k : n.kids) traverse(*k);
        break;
      case NodeKind::Expr:
        fill();
        set(Prec::Yield, n.kid(0));
        traverse(*n.kid(0));
        break;
      case NodeKind::Assign:
        fill();
        for (const auto& t : n.kid(0)->kids) {
          set(Prec::Tuple, t.get());
          traverse(*t);
          out_ += " = ";
        }
        traverse(*n.kid(1));
        break;
      case NodeKind::AugAssign:
        fill();
        traverse(*n.kid(0));
        out_ += " " + n.text + "= ";
        traverse(*n.kid(1));
        break;
      case NodeKind::AnnAssign: {
        fill();
        bool paren = !n.flag && n.kid(0)->kind == NodeKind::Name;
        if (paren) out_ += "(";
        traverse(*n.kid(0));
        if (paren) out_ += ")";
        out_ += ": ";
        traverse(*n.kid(1));
        if (n.kid(2)) {
          out_ += " = ";
          traverse(*n.kid(2));
        }
        break;
      }
      case NodeKind::Return:
        fill("return");
        if (n.kid(0)) {
          out_ += " ";
          traverse(*n.kid(0));
        }
        break;
      case NodeKind::Pass: fill("pass"); break;
      case NodeKind::Break: fill("break"); break;
      case NodeKind::Continue: fill("continue"); break;
      case NodeKind::Delete:
        fill("del ");
        interleave(n.kids);
        break;
      case NodeKind::Assert:
        fill("assert ");
        traverse(*n.kid(0));
        if (n.kid(1)) {
          out_ += ", ";
          traverse(*n.kid(1));
        }
        break;
      case NodeKind::Global:
      case NodeKind::Nonlocal:
        fill(n.kind == NodeKind::Global ? "global " : "nonlocal ");
        for (std::size_t i = 0; i < n.ops.size(); ++i) {
          if (i) out_ += ", ";
          out_ += n.ops[i];
        }
        break;
      case NodeKind::Import:
        fill("import ");
        interleave(n.kids);
        break;
      case NodeKind::ImportFrom:
        fill("from ");
        out_ += std::string(static_cast<std::size_t>(n.level), '.');
        out_ += n.text;
        out_ += " import ";
        interleave(n.kids);
        break;
      case NodeKind::Alias:
        out_ += n.text;
        if (!n.text2.empty()) out_ += " as " + n.text2;
        break;
      case NodeKind::Raise:
        fill("raise");
        if (!n.kid(0)) break;
        out_ += " ";
        traverse(*n.kid(0));
        if (n.kid(1)) {
          out_ += " from ";
          traverse(*n.kid(1));
        }
        break;
      case NodeKind::Try:
      case NodeKind::TryStar: {
        bool prev = in_try_star_;
        in_try_star_ = n.kind == NodeKind::TryStar;
        fill("try");
        block(*n.kid(0));
        for (const auto& h : n.kid(1)->kids) traverse(*h);
        if (!n.kid(2)->kids.empty()) {
          fill("else");
          block(*n.kid(2));
        }
        if (!n.kid(3)->kids.empty()) {
          fill("finally");
          block(*n.kid(3));
        }
        in_try_star_ = prev;
        break;
      }
      case NodeKind::ExceptHandler:
        fill(in_try_star_ ? "except*" : "except");
        if (n.kid(0)) {
          out_ += " ";
          traverse(*n.kid(0));
        }
        if (!n.text.empty()) out_ += " as " + n.text;
        block(*n.kid(1));
        break;
      case NodeKind::ClassDef: {
        maybe_newline();
        decorators(*n.kid(0));
        fill("class " + n.text);
        type_params(*n.kid(4));
        bool parens = !n.kid(1)->kids.empty() || !n.kid(2)->kids.empty();
        if (parens) {
          out_ += "(";
          bool comma = false;
          for (const auto* seq : {n.kid(1), n.kid(2)}) {
            for (const auto& e : seq->kids) {
              if (comma) out_ += ", ";
              comma = true;
              traverse(*e);
            }
          }
          out_ += ")";
        }
        out_ += ":";
        ++indent_;
        body_with_docstring(n.kid(3)->kids);
        --indent_;
        break;
      }
      case NodeKind::FunctionDef:
        maybe_newline();
        decorators(*n.kid(0));
        fill(std::string(n.flag ? "async def " : "def ") + n.text);
        type_params(*n.kid(4));
        out_ += "(";
        traverse(*n.kid(1));
        out_ += ")";
        if (n.kid(2)) {
          out_ += " -> ";
          traverse(*n.kid(2));
        }
        out_ += ":";
        ++indent_;
        body_with_docstring(n.kid(3)->kids);
        --indent_;
        break;
      case NodeKind::For:
        fill(n.flag ? "async for " : "for ");
        set(Prec::Tuple, n.kid(0));
        traverse(*n.kid(0));
        out_ += " in ";
        traverse(*n.kid(1));
        block(*n.kid(2));
        if (!n.kid(3)->kids.empty()) {
          fill("else");
          block(*n.kid(3));
        }
        break;
      case NodeKind::If: {
        fill("if ");
        traverse(*n.kid(0));
        block(*n.kid(1));
        const Node* cur = &n;
        while (cur->kid(2)->kids.size() == 1 && cur->kid(2)->kids[0]->kind == NodeKind::If) {
          cur = cur->kid(2)->kids[0].get();
          fill("elif ");
          traverse(*cur->kid(0));
          block(*cur->kid(1));
        }
        if (!cur->kid(2)->kids.empty()) {
          fill("else");
          block(*cur->kid(2));
        }
        break;
      }
      case NodeKind::While:
        fill("while ");
        traverse(*n.kid(0));
        block(*n.kid(1));
        if (!n.kid(2)->kids.empty()) {
          fill("else");
          block(*n.kid(2));
        }
        break;
      case NodeKind::With:
        fill(n.flag ? "async with " : "with ");
        interleave(n.kid(0)->kids);
        block(*n.kid(1));
        break;
      case NodeKind::WithItem:
        traverse(*n.kid(0));
        if (n.kid(1)) {
          out_ += " as ";
          traverse(*n.kid(1));
        }
        break;
      case NodeKind::Match:
        fill("match ");
        traverse(*n.kid(0));
        out_ += ":";
        ++indent_;
        for (const auto& c : n.kid(1)->kids) traverse(*c);
        --indent_;
        break;
      case NodeKind::MatchCase:
        fill("case ");
        traverse(*n.kid(0));
        if (n.kid(1)) {
          out_ += " if ";
          traverse(*n.kid(1));
        }
        block(*n.kid(2));
        break;
      case NodeKind::TypeAlias:
        fill("type ");
        traverse(*n.kid(0));
        type_params(*n.kid(1));
        out_ += " = ";
        traverse(*n.kid(2));
        break;
      case NodeKind::TypeVar:
        out_ += n.text;
        if (n.kid(0)) {
          out_ += ": ";
          traverse(*n.kid(0));
        }
        if (n.kid(1)) {
          out_ += " = ";
          traverse(*n.kid(1));
        }
        break;
      case NodeKind::ParamSpec:
      case NodeKind::TypeVarTuple:
        out_ += (n.kind == NodeKind::ParamSpec ? "**" : "*") + n.text;
        if (n.kid(0)) {
          out_ += " = ";
          traverse(*n.kid(0));
        }
        break;
      default: expr(n); break;
    }
  }

 private:
  bool is_docstring(const Node& s) const {
    return s.kind == NodeKind::Expr && s.kid(0)->kind == NodeKind::Constant && s.kid(0)->constant == ConstKind::Str &&
           s.kid(0)->text2.empty();
  }

  void maybe_newline() {
    if (!out_.empty()) out_ += nl_;
  }
  void fill(std::string_view text = {}) {
    if (!out_.empty()) {
      out_ += nl_;
      out_ += base_;
    }
    for (int i = 0; i < indent_; ++i) out_ += "    ";
    out_ += text;
  }
  void block(const Node& seq) {
    out_ += ":";
    ++indent_;
    traverse(seq);
    --indent_;
  }
  void decorators(const Node& seq) {
    for (const auto& d : seq.kids) {
      fill("@");
      traverse(*d);
    }
  }
  void type_params(const Node& seq) {
    if (seq.kids.empty()) return;
    out_ += "[";
    interleave(seq.kids);
    out_ += "]";
  }
  void interleave(const std::vector<NodePtr>& items, std::string_view sep = ", ") {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out_ += sep;
      traverse(*items[i]);
    }
  }
  void items_view(const std::vector<NodePtr>& items) {
    if (items.size() == 1) {
      traverse(*items[0]);
      out_ += ",";
    } else {
      interleave(items);
    }
  }

  Prec get(const Node& n) const {
    auto it = prec_.find(&n);
    return it == prec_.end() ? Prec::Test : it->second;
  }
  void set(Prec p, const Node* n) {
    if (n) prec_[n] = p;
  }
  bool open_if(Prec p, const Node& n) {
    bool paren = get(n) > p;
    if (paren) out_ += "(";
    return paren;
  }
  void close_if(bool paren) {
    if (paren) out_ += ")";
  }

  void constant(const Node& n) {
    switch (n.constant) {
      case ConstKind::None: out_ += "None"; break;
      case ConstKind::True: out_ += "True"; break;
      case ConstKind::False: out_ += "False"; break;
      case ConstKind::Ellipsis: out_ += "..."; break;
      case ConstKind::Int: out_ += n.text; break;
      case ConstKind::Float: out_ += float_text(n.text); break;
      case ConstKind::Complex: out_ += float_text(n.text) + "j"; break;
      case ConstKind::Str: out_ += n.text2.empty() ? repr_str(n.text) : n.text2; break;
      case ConstKind::Bytes: out_ += n.text2.empty() ? repr_bytes(n.text) : n.text2; break;
    }
  }

  void arguments(const Node& a) {
    bool first = true;
    auto comma = [&] {
      if (first) first = false;
      else out_ += ", ";
    };
    const auto& posonly = a.kid(0)->kids;
    const auto& args = a.kid(1)->kids;
    const auto& defaults = a.kid(6)->kids;
    std::size_t total = posonly.size() + args.size();
    std::size_t first_default = total - defaults.size();
    for (std::size_t i = 0; i < total; ++i) {
      const Node& arg = i < posonly.size() ? *posonly[i] : *args[i - posonly.size()];
      comma();
      traverse(arg);
      if (i >= first_default) {
        out_ += "=";
        traverse(*defaults[i - first_default]);
      }
      if (i + 1 == posonly.size()) out_ += ", /";
    }
    const Node* vararg = a.kid(2);
    const auto& kwonly = a.kid(3)->kids;
    if (vararg || !kwonly.empty()) {
      comma();
      out_ += "*";
      if (vararg) {
        out_ += vararg->text;
        if (vararg->kid(0)) {
          out_ += ": ";
          traverse(*vararg->kid(0));
        }
      }
    }
    const auto& kw_defaults = a.kid(4)->kids;
    for (std::size_t i = 0; i < kwonly.size(); ++i) {
      out_ += ", ";
      traverse(*kwonly[i]);
      if (i < kw_defaults.size() && kw_defaults[i]) {
        out_ += "=";
        traverse(*kw_defaults[i]);
      }
    }
    if (const Node* kwarg = a.kid(5)) {
      comma();
      out_ += "**" + kwarg->text;
      if (kwarg->kid(0)) {
        out_ += ": ";
        traverse(*kwarg->kid(0));
      }
    }
  }

  void comprehensions(const Node& n, std::size_t from) {
    for (std::size_t i = from; i < n.kids.size(); ++i) {
      const Node& c = *n.kids[i];
      out_ += c.flag ? " async for " : " for ";
      set(Prec::Tuple, c.kid(0));
      traverse(*c.kid(0));
      out_ += " in ";
      for (std::size_t k = 1; k < c.kids.size(); ++k) set(next(Prec::Test), c.kid(k));
      traverse(*c.kid(1));
      for (std::size_t k = 2; k < c.kids.size(); ++k) {
        out_ += " if ";
        traverse(*c.kid(k));
      }
    }
  }

  void expr(const Node& n) {
    switch (n.kind) {
      case NodeKind::Name: out_ += n.text; break;
      case NodeKind::Constant: constant(n); break;
      case NodeKind::JoinedStr:
        for (std::size_t i = 0; i < n.ops.size(); ++i) {
          if (i) out_ += " ";
          out_ += n.ops[i];
        }
        break;
      case NodeKind::Attribute: {
        const Node& v = *n.kid(0);
        set(Prec::Atom, &v);
        traverse(v);
        if (v.kind == NodeKind::Constant &&
            (v.constant == ConstKind::Int || v.constant == ConstKind::True || v.constant == ConstKind::False))
          out_ += " ";
        out_ += "." + n.text;
        break;
      }
      case NodeKind::Call: {
        set(Prec::Atom, n.kid(0));
        traverse(*n.kid(0));
        out_ += "(";
        bool comma = false;
        for (const auto* seq : {n.kid(1), n.kid(2)}) {
          for (const auto& e : seq->kids) {
            if (comma) out_ += ", ";
            comma = true;
            traverse(*e);
          }
        }
        out_ += ")";
        break;
      }
      case NodeKind::Keyword:
        if (n.text.empty()) out_ += "**";
        else out_ += n.text + "=";
        traverse(*n.kid(0));
        break;
      case NodeKind::Subscript: {
        set(Prec::Atom, n.kid(0));
        traverse(*n.kid(0));
        out_ += "[";
        const Node& s = *n.kid(1);
        if (s.kind == NodeKind::Tuple && !s.kids.empty()) items_view(s.kids);
        else traverse(s);
        out_ += "]";
        break;
      }
      case NodeKind::Slice:
        if (n.kid(0)) traverse(*n.kid(0));
        out_ += ":";
        if (n.kid(1)) traverse(*n.kid(1));
        if (n.kid(2)) {
          out_ += ":";
          traverse(*n.kid(2));
        }
        break;
      case NodeKind::Starred:
        out_ += "*";
        set(Prec::Expr, n.kid(0));
        traverse(*n.kid(0));
        break;
      case NodeKind::List:
        out_ += "[";
        interleave(n.kids);
        out_ += "]";
        break;
      case NodeKind::Tuple: {
        bool paren = n.kids.empty() || get(n) > Prec::Tuple;
        if (paren) out_ += "(";
        items_view(n.kids);
        if (paren) out_ += ")";
        break;
      }
      case NodeKind::Set:
        if (n.kids.empty()) {
          out_ += "{*()}";
          break;
        }
        out_ += "{";
        interleave(n.kids);
        out_ += "}";
        break;
      case NodeKind::Dict: {
        out_ += "{";
        const auto& keys = n.kid(0)->kids;
        const auto& values = n.kid(1)->kids;
        for (std::size_t i = 0; i < values.size(); ++i) {
          if (i) out_ += ", ";
          if (!keys[i]) {
            out_ += "**";
            set(Prec::Expr, values[i].get());
            traverse(*values[i]);
          } else {
            traverse(*keys[i]);
            out_ += ": ";
            traverse(*values[i]);
          }
        }
        out_ += "}";
        break;
      }
      case NodeKind::ListComp:
      case NodeKind::SetComp:
      case NodeKind::GeneratorExp: {
        const char* open = n.kind == NodeKind::ListComp ? "[" : n.kind == NodeKind::SetComp ? "{" : "(";
        const char* close = n.kind == NodeKind::ListComp ? "]" : n.kind == NodeKind::SetComp ? "}" : ")";
        out_ += open;
        traverse(*n.kid(0));
        comprehensions(n, 1);
        out_ += close;
        break;
      }
      case NodeKind::DictComp:
        out_ += "{";
        traverse(*n.kid(0));
        out_ += ": ";
        traverse(*n.kid(1));
        comprehensions(n, 2);
        out_ += "}";
        break;
      case NodeKind::IfExp: {
        bool p = open_if(Prec::Test, n);
        set(next(Prec::Test), n.kid(1));
        set(next(Prec::Test), n.kid(0));
        traverse(*n.kid(1));
        out_ += " if ";
        traverse(*n.kid(0));
        out_ += " else ";
        set(Prec::Test, n.kid(2));
        traverse(*n.kid(2));
        close_if(p);
        break;
      }
      case NodeKind::UnaryOp: {
        Prec op = n.text == "not" ? Prec::Not : Prec::Factor;
        bool p = open_if(op, n);
        out_ += n.text;
        if (op != Prec::Factor) out_ += " ";
        set(op, n.kid(0));
        traverse(*n.kid(0));
        close_if(p);
        break;
      }
      case NodeKind::BinOp: {
        Prec op = binop_prec(n.text);
        bool p = open_if(op, n);
        bool rassoc = n.text == "**";
        set(rassoc ? next(op) : op, n.kid(0));
        traverse(*n.kid(0));
        out_ += " " + n.text + " ";
        set(rassoc ? op : next(op), n.kid(1));
        traverse(*n.kid(1));
        close_if(p);
        break;
      }
      case NodeKind::Compare: {
        bool p = open_if(Prec::Cmp, n);
        for (const auto& k : n.kids) set(next(Prec::Cmp), k.get());
        traverse(*n.kid(0));
        for (std::size_t i = 0; i < n.ops.size(); ++i) {
          out_ += " " + n.ops[i] + " ";
          traverse(*n.kid(i + 1));
        }
        close_if(p);
        break;
      }
      case NodeKind::BoolOp: {
        Prec op = n.text == "and" ? Prec::And : Prec::Or;
        bool p = open_if(op, n);
        std::string sep = " " + n.text + " ";
        for (std::size_t i = 0; i < n.kids.size(); ++i) {
          if (i) out_ += sep;
          op = next(op);
          set(op, n.kid(i));
          traverse(*n.kid(i));
        }
        close_if(p);
        break;
      }
      case NodeKind::NamedExpr: {
        bool p = open_if(Prec::NamedExpr, n);
        set(Prec::Atom, n.kid(0));
        set(Prec::Atom, n.kid(1));
        traverse(*n.kid(0));
        out_ += " := ";
        traverse(*n.kid(1));
        close_if(p);
        break;
      }
      case NodeKind::Lambda: {
        bool p = open_if(Prec::Test, n);
        out_ += "lambda";
        std::size_t mark = out_.size();
        out_ += " ";
        traverse(*n.kid(0));
        if (out_.size() == mark + 1) out_.pop_back();
        out_ += ": ";
        set(Prec::Test, n.kid(1));
        traverse(*n.kid(1));
        close_if(p);
        break;
      }
      case NodeKind::Arguments: arguments(n); break;
      case NodeKind::Arg:
        out_ += n.hole ? "@{" + std::string(hole_kind_name(n.hole->kind)) + ": " + n.hole->binder + "}" : n.text;
        if (n.kid(0)) {
          out_ += ": ";
          traverse(*n.kid(0));
        }
        break;
      case NodeKind::Await:
      case NodeKind::Yield:
      case NodeKind::YieldFrom: {
        bool p = open_if(n.kind == NodeKind::Await ? Prec::Await : Prec::Yield, n);
        out_ += n.kind == NodeKind::Await ? "await" : n.kind == NodeKind::Yield ? "yield" : "yield from";
        if (n.kid(0)) {
          out_ += " ";
          set(Prec::Atom, n.kid(0));
          traverse(*n.kid(0));
        }
        close_if(p);
        break;
      }
      case NodeKind::MatchValue: traverse(*n.kid(0)); break;
      case NodeKind::MatchSingleton: constant(n); break;
      case NodeKind::MatchSequence:
        out_ += "[";
        interleave(n.kids);
        out_ += "]";
        break;
      case NodeKind::MatchStar: out_ += "*" + (n.flag ? n.text : std::string("_")); break;
      case NodeKind::MatchMapping: {
        out_ += "{";
        const auto& keys = n.kid(0)->kids;
        const auto& pats = n.kid(1)->kids;
        for (std::size_t i = 0; i < keys.size(); ++i) {
          if (i) out_ += ", ";
          traverse(*keys[i]);
          out_ += ": ";
          traverse(*pats[i]);
        }
        if (n.flag) {
          if (!keys.empty()) out_ += ", ";
          out_ += "**" + n.text;
        }
        out_ += "}";
        break;
      }
      case NodeKind::MatchClass: {
        set(Prec::Atom, n.kid(0));
        traverse(*n.kid(0));
        out_ += "(";
        interleave(n.kid(1)->kids);
        const auto& kp = n.kid(2)->kids;
        if (!n.ops.empty() && !n.kid(1)->kids.empty()) out_ += ", ";
        for (std::size_t i = 0; i < n.ops.size(); ++i) {
          if (i) out_ += ", ";
          out_ += n.ops[i] + "=";
          traverse(*kp[i]);
        }
        out_ += ")";
        break;
      }
      case NodeKind::MatchAs:
        if (!n.flag) {
          out_ += "_";
        } else if (!n.kid(0)) {
          out_ += n.text;
        } else {
          bool p = open_if(Prec::Test, n);
          set(Prec::BOr, n.kid(0));
          traverse(*n.kid(0));
          out_ += " as " + n.text;
          close_if(p);
        }
        break;
      case NodeKind::MatchOr: {
        bool p = open_if(Prec::BOr, n);
        for (const auto& k : n.kids) set(next(Prec::BOr), k.get());
        interleave(n.kids, " | ");
        close_if(p);
        break;
      }
      case NodeKind::Hole: {
        const HoleSpec& h = *n.hole;
        if (h.fresh) out_ += "@{$" + h.binder + "}";
        else if (h.reference) out_ += "@{" + h.binder + "}";
        else out_ += "@{" + std::string(hole_kind_name(h.kind)) + (h.binder.empty() ? "" : ": " + h.binder) + "}";
        break;
      }
      default: break;
    }
  }

  std::string out_;
  std::string base_;
  std::string nl_;
  int indent_ = 0;
  bool in_try_star_ = false;
  std::unordered_map<const Node*, Prec> prec_;
};

}  // namespace

std::string repr_str(std::string_view s) {
  bool has_single = s.find('\'') != std::string_view::npos;
  bool has_double = s.find('"') != std::string_view::npos;
  char quote = has_single && !has_double ? '"' : '\'';
  std::string out(1, quote);
  for (std::size_t i = 0; i < s.size();) {
    std::size_t start = i;
    char32_t cp = detail::next_code_point(s, i);
    if (cp == static_cast<char32_t>(quote) || cp == '\\') {
      out.push_back('\\');
      out.push_back(static_cast<char>(cp));
    } else if (cp == '\t') {
      out += "\\t";
    } else if (cp == '\n') {
      out += "\\n";
    } else if (cp == '\r') {
      out += "\\r";
    } else if (!detail::is_printable(cp)) {
      out += unicode_escape(cp);
    } else {
      out.append(s.substr(start, i - start));
    }
  }
  out.push_back(quote);
  return out;
}

std::string repr_bytes(std::string_view s) {
  bool has_single = s.find('\'') != std::string_view::npos;
  bool has_double = s.find('"') != std::string_view::npos;
  char quote = has_single && !has_double ? '"' : '\'';
  std::string out = "b";
  out.push_back(quote);
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (c == static_cast<unsigned char>(quote) || c == '\\') {
      out.push_back('\\');
      out.push_back(ch);
    } else if (c == '\t') {
      out += "\\t";
    } else if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else if (c < 0x20 || c >= 0x7F) {
      out += "\\x" + hex(c, 2);
    } else {
      out.push_back(ch);
    }
  }
  out.push_back(quote);
  return out;
}

std::string repr_float(double v) { return detail::format_float(v, true); }

std::string unparse(const Module& m) { return unparse_module_node(*m.root); }

std::string unparse_module_node(const Node& module) {
  Unparser u("", "\n");
  u.traverse(module);
  return u.take();
}

std::string unparse_statements(const std::vector<const Node*>& stmts, std::string_view indent,
                               std::string_view newline) {
  Unparser u(indent, newline);
  u.stmts(stmts);
  return u.take();
}

std::string unparse_statement(const Node& stmt) { return unparse_statements({&stmt}); }

std::string unparse_expr(const Node& e) {
  Unparser u("", "\n");
  u.traverse(e);
  return u.take();
}

}  // namespace cellrw::syntax
