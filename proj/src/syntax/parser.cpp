#include "cellrw/syntax/parser.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "lexer.hpp"
#include "literal.hpp"

namespace cellrw::syntax {

namespace {

using detail::SyntaxError;
using detail::Token;
using detail::TokenKind;

constexpr std::array<std::string_view, 35> kKeywords = {
    "False", "None",   "True",    "and",      "as",     "assert", "async", "await", "break",
    "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
    "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
    "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield",
};

bool is_keyword(std::string_view s) {
  return std::find(kKeywords.begin(), kKeywords.end(), s) != kKeywords.end();
}

constexpr int kMaxDepth = 200;

class Parser {
 public:
  Parser(std::string_view src, std::vector<Token> toks, bool tmpl)
      : src_(src), toks_(std::move(toks)), template_(tmpl) {}

  NodePtr file() {
    auto mod = make_node(NodeKind::Module, {0, static_cast<std::uint32_t>(src_.size())});
    while (cur().kind != TokenKind::EndMarker) {
      if (cur().kind == TokenKind::Newline) {
        advance();
        continue;
      }
      statement(mod->kids);
    }
    return mod;
  }

  NodePtr single_expression() {
    while (cur().kind == TokenKind::Newline) advance();
    auto e = star_expressions();
    while (cur().kind == TokenKind::Newline) advance();
    if (cur().kind != TokenKind::EndMarker) error("unexpected trailing input");
    return e;
  }

 private:
  // --- token helpers -----------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k = 1) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_op(std::string_view o) const { return cur().kind == TokenKind::Op && cur().text == o; }
  bool at_kw(std::string_view k) const { return cur().kind == TokenKind::Name && cur().text == k; }
  static bool is_op(const Token& t, std::string_view o) { return t.kind == TokenKind::Op && t.text == o; }
  static bool is_kw(const Token& t, std::string_view k) { return t.kind == TokenKind::Name && t.text == k; }
  const Token& advance() {
    prev_end_ = cur().end;
    return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_];
  }
  bool accept_op(std::string_view o) {
    if (!at_op(o)) return false;
    advance();
    return true;
  }
  bool accept_kw(std::string_view k) {
    if (!at_kw(k)) return false;
    advance();
    return true;
  }
  void expect_op(std::string_view o) {
    if (!accept_op(o)) error("expected '" + std::string(o) + "'");
  }
  void expect_kw(std::string_view k) {
    if (!accept_kw(k)) error("expected '" + std::string(k) + "'");
  }
  void expect_newline() {
    if (cur().kind != TokenKind::Newline) error("invalid syntax");
    advance();
  }
  std::string expect_name() {
    if (cur().kind != TokenKind::Name || is_keyword(cur().text)) error("expected identifier");
    return std::string(advance().text);
  }
  [[noreturn]] void error(const std::string& msg) const { throw SyntaxError(msg, cur().begin); }
  [[noreturn]] void error_at(const std::string& msg, std::uint32_t at) const { throw SyntaxError(msg, at); }

  NodePtr node(NodeKind k, std::uint32_t begin) const { return make_node(k, {begin, prev_end_}); }
  void finish(Node& n, std::uint32_t begin) const { n.span = {begin, prev_end_}; }
  static void fit_seq(Node& seq) {
    if (seq.kids.empty()) return;
    const Node* first = nullptr;
    const Node* last = nullptr;
    for (const auto& k : seq.kids) {
      if (!k || !k->span.valid()) continue;
      if (!first) first = k.get();
      last = k.get();
    }
    if (first) seq.span = {first->span.begin, last->span.end};
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth) p_.error("too many nested expressions or blocks");
    }
    ~DepthGuard() { --p_.depth_; }
    Parser& p_;
  };

  bool starts_expression() const {
    const Token& t = cur();
    switch (t.kind) {
      case TokenKind::Number:
      case TokenKind::String:
      case TokenKind::Hole: return true;
      case TokenKind::Name:
        if (!is_keyword(t.text)) return true;
        return t.text == "not" || t.text == "lambda" || t.text == "await" || t.text == "True" ||
               t.text == "False" || t.text == "None" || t.text == "yield";
      case TokenKind::Op:
        return t.text == "(" || t.text == "[" || t.text == "{" || t.text == "-" || t.text == "+" ||
               t.text == "~" || t.text == "*" || t.text == "...";
      default: return false;
    }
  }

  // --- statements --------------------------------------------------------
  void statement(std::vector<NodePtr>& out) {
    DepthGuard guard(*this);
    const Token& t = cur();
    if (t.kind == TokenKind::Indent) error("unexpected indent");
    if (t.kind == TokenKind::Dedent) error("unexpected unindent");
    if (t.kind == TokenKind::Name) {
      std::string_view s = t.text;
      std::uint32_t b = t.begin;
      if (s == "if") return out.push_back(if_stmt());
      if (s == "while") return out.push_back(while_stmt());
      if (s == "for") return out.push_back(for_stmt(false, b));
      if (s == "try") return out.push_back(try_stmt());
      if (s == "with") return out.push_back(with_stmt(false, b));
      if (s == "def") return out.push_back(funcdef(make_seq(), b, false));
      if (s == "class") return out.push_back(classdef(make_seq(), b));
      if (s == "async") {
        advance();
        if (at_kw("def")) return out.push_back(funcdef(make_seq(), b, true));
        if (at_kw("with")) return out.push_back(with_stmt(true, b));
        if (at_kw("for")) return out.push_back(for_stmt(true, b));
        error("invalid syntax");
      }
      if (s == "match") {
        if (auto m = try_match_stmt()) return out.push_back(std::move(m));
      }
    } else if (at_op("@")) {
      return out.push_back(decorated());
    }
    simple_stmts(out);
  }

  void simple_stmts(std::vector<NodePtr>& out) {
    while (true) {
      out.push_back(simple_stmt());
      if (accept_op(";")) {
        if (cur().kind == TokenKind::Newline) break;
        continue;
      }
      break;
    }
    expect_newline();
  }

  NodePtr simple_stmt() {
    const Token& t = cur();
    std::uint32_t b = t.begin;
    if (t.kind == TokenKind::Name) {
      std::string_view s = t.text;
      if (s == "pass" || s == "break" || s == "continue") {
        advance();
        return node(s == "pass" ? NodeKind::Pass : s == "break" ? NodeKind::Break : NodeKind::Continue, b);
      }
      if (s == "return") {
        advance();
        auto n = make_node(NodeKind::Return);
        n->kids.push_back(starts_expression() ? star_expressions() : nullptr);
        finish(*n, b);
        return n;
      }
      if (s == "raise") {
        advance();
        auto n = make_node(NodeKind::Raise);
        n->kids.push_back(starts_expression() ? expression() : nullptr);
        n->kids.push_back(n->kids[0] && accept_kw("from") ? expression() : nullptr);
        finish(*n, b);
        return n;
      }
      if (s == "global" || s == "nonlocal") {
        advance();
        auto n = make_node(s == "global" ? NodeKind::Global : NodeKind::Nonlocal);
        do n->ops.push_back(expect_name());
        while (accept_op(","));
        finish(*n, b);
        return n;
      }
      if (s == "del") {
        advance();
        auto n = make_node(NodeKind::Delete);
        do {
          if (cur().kind == TokenKind::Newline || at_op(";")) break;
          auto target = bitwise_or();
          check_del_target(*target);
          n->kids.push_back(std::move(target));
        } while (accept_op(","));
        if (n->kids.empty()) error("invalid syntax");
        finish(*n, b);
        return n;
      }
      if (s == "assert") {
        advance();
        auto n = make_node(NodeKind::Assert);
        n->kids.push_back(expression());
        n->kids.push_back(accept_op(",") ? expression() : nullptr);
        finish(*n, b);
        return n;
      }
      if (s == "import") return import_stmt();
      if (s == "from") return import_from();
      if (s == "type" && peek().kind == TokenKind::Name && !is_keyword(peek().text) &&
          (is_op(peek(2), "=") || is_op(peek(2), "["))) {
        return type_alias();
      }
    }
    return expr_stmt();
  }

  NodePtr expr_stmt() {
    std::uint32_t b = cur().begin;
    bool parenthesized = at_op("(");
    NodePtr first = at_kw("yield") ? yield_expr() : star_expressions();
    if (at_op("=")) {
      auto n = make_node(NodeKind::Assign);
      auto targets = make_seq();
      targets->kids.push_back(std::move(first));
      while (accept_op("=")) targets->kids.push_back(at_kw("yield") ? yield_expr() : star_expressions());
      NodePtr value = std::move(targets->kids.back());
      targets->kids.pop_back();
      for (const auto& t : targets->kids) check_target(*t);
      fit_seq(*targets);
      n->kids.push_back(std::move(targets));
      n->kids.push_back(std::move(value));
      finish(*n, b);
      return n;
    }
    if (at_op(":")) {
      advance();
      NodeKind k = first->kind;
      if (k != NodeKind::Name && k != NodeKind::Attribute && k != NodeKind::Subscript && k != NodeKind::Hole)
        error_at("illegal target for annotation", first->span.begin);
      auto n = make_node(NodeKind::AnnAssign);
      n->flag = k == NodeKind::Name && !parenthesized;
      n->kids.push_back(std::move(first));
      n->kids.push_back(expression());
      n->kids.push_back(accept_op("=") ? (at_kw("yield") ? yield_expr() : star_expressions()) : nullptr);
      finish(*n, b);
      return n;
    }
    if (cur().kind == TokenKind::Op && cur().text.size() >= 2 && cur().text.back() == '=' &&
        cur().text != "==" && cur().text != "<=" && cur().text != ">=" && cur().text != "!=") {
      std::string op(cur().text.substr(0, cur().text.size() - 1));
      advance();
      NodeKind k = first->kind;
      if (k != NodeKind::Name && k != NodeKind::Attribute && k != NodeKind::Subscript && k != NodeKind::Hole)
        error_at("illegal expression for augmented assignment", first->span.begin);
      auto n = make_node(NodeKind::AugAssign);
      n->text = op;
      n->kids.push_back(std::move(first));
      n->kids.push_back(at_kw("yield") ? yield_expr() : star_expressions());
      finish(*n, b);
      return n;
    }
    auto n = make_node(NodeKind::Expr);
    n->kids.push_back(std::move(first));
    finish(*n, b);
    return n;
  }

  void check_target(const Node& n) const {
    switch (n.kind) {
      case NodeKind::Name:
      case NodeKind::Attribute:
      case NodeKind::Subscript:
      case NodeKind::Hole: return;
      case NodeKind::Starred: return check_target(*n.kid(0));
      case NodeKind::Tuple:
      case NodeKind::List:
        for (const auto& k : n.kids) check_target(*k);
        return;
      default: error_at("cannot assign to " + std::string(kind_name(n.kind)), n.span.begin);
    }
  }

  void check_del_target(const Node& n) const {
    switch (n.kind) {
      case NodeKind::Name:
      case NodeKind::Attribute:
      case NodeKind::Subscript: return;
      case NodeKind::Tuple:
      case NodeKind::List:
        for (const auto& k : n.kids) check_del_target(*k);
        return;
      default: error_at("cannot delete " + std::string(kind_name(n.kind)), n.span.begin);
    }
  }

  std::string dotted_name() {
    std::string s = expect_name();
    while (at_op(".")) {
      advance();
      s += "." + expect_name();
    }
    return s;
  }

  NodePtr alias(bool dotted) {
    std::uint32_t b = cur().begin;
    auto a = make_node(NodeKind::Alias);
    a->text = dotted ? dotted_name() : expect_name();
    if (accept_kw("as")) a->text2 = expect_name();
    finish(*a, b);
    return a;
  }

  NodePtr import_stmt() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::Import);
    do n->kids.push_back(alias(true));
    while (accept_op(","));
    finish(*n, b);
    return n;
  }

  NodePtr import_from() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::ImportFrom);
    while (at_op(".") || at_op("...")) n->level += static_cast<int>(advance().text.size());
    if (!at_kw("import")) n->text = dotted_name();
    else if (n->level == 0) error("expected module name");
    expect_kw("import");
    if (at_op("*")) {
      std::uint32_t sb = cur().begin;
      advance();
      auto a = node(NodeKind::Alias, sb);
      a->text = "*";
      n->kids.push_back(std::move(a));
    } else if (accept_op("(")) {
      do {
        if (at_op(")")) break;
        n->kids.push_back(alias(false));
      } while (accept_op(","));
      expect_op(")");
      if (n->kids.empty()) error("expected name");
    } else {
      do n->kids.push_back(alias(false));
      while (accept_op(","));
    }
    finish(*n, b);
    return n;
  }

  NodePtr type_alias() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::TypeAlias);
    std::uint32_t nb = cur().begin;
    auto name = make_name(expect_name());
    finish(*name, nb);
    n->kids.push_back(std::move(name));
    n->kids.push_back(type_params());
    expect_op("=");
    n->kids.push_back(expression());
    finish(*n, b);
    return n;
  }

  NodePtr type_params() {
    auto seq = make_seq();
    if (!accept_op("[")) return seq;
    do {
      if (at_op("]")) break;
      std::uint32_t b = cur().begin;
      NodePtr p;
      if (accept_op("*")) {
        p = make_node(NodeKind::TypeVarTuple);
        p->text = expect_name();
        p->kids.push_back(accept_op("=") ? star_expression() : nullptr);
      } else if (accept_op("**")) {
        p = make_node(NodeKind::ParamSpec);
        p->text = expect_name();
        p->kids.push_back(accept_op("=") ? expression() : nullptr);
      } else {
        p = make_node(NodeKind::TypeVar);
        p->text = expect_name();
        p->kids.push_back(accept_op(":") ? expression() : nullptr);
        p->kids.push_back(accept_op("=") ? expression() : nullptr);
      }
      finish(*p, b);
      seq->kids.push_back(std::move(p));
    } while (accept_op(","));
    expect_op("]");
    if (seq->kids.empty()) error("type parameter list cannot be empty");
    fit_seq(*seq);
    return seq;
  }

  NodePtr block() {
    expect_op(":");
    auto seq = make_seq();
    if (cur().kind == TokenKind::Newline) {
      advance();
      if (cur().kind != TokenKind::Indent) error("expected an indented block");
      advance();
      while (cur().kind != TokenKind::Dedent && cur().kind != TokenKind::EndMarker) statement(seq->kids);
      if (cur().kind == TokenKind::Dedent) advance();
    } else {
      simple_stmts(seq->kids);
    }
    fit_seq(*seq);
    return seq;
  }

  NodePtr if_stmt() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::If);
    n->kids.push_back(named_expression());
    n->kids.push_back(block());
    auto orelse = make_seq();
    if (at_kw("elif")) {
      orelse->kids.push_back(if_stmt());
    } else if (accept_kw("else")) {
      orelse = block();
    }
    fit_seq(*orelse);
    n->kids.push_back(std::move(orelse));
    finish(*n, b);
    return n;
  }

  NodePtr while_stmt() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::While);
    n->kids.push_back(named_expression());
    n->kids.push_back(block());
    n->kids.push_back(accept_kw("else") ? block() : make_seq());
    finish(*n, b);
    return n;
  }

  NodePtr target_list() {
    std::uint32_t b = cur().begin;
    auto item = [&]() -> NodePtr {
      if (at_op("*")) {
        std::uint32_t sb = cur().begin;
        advance();
        auto s = make_node(NodeKind::Starred);
        s->kids.push_back(bitwise_or());
        finish(*s, sb);
        return s;
      }
      return bitwise_or();
    };
    auto first = item();
    if (!at_op(",")) {
      check_target(*first);
      return first;
    }
    auto t = make_node(NodeKind::Tuple);
    t->kids.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_kw("in") || at_op("=")) break;
      t->kids.push_back(item());
    }
    finish(*t, b);
    check_target(*t);
    return t;
  }

  NodePtr for_stmt(bool async, std::uint32_t b) {
    expect_kw("for");
    auto n = make_node(NodeKind::For);
    n->flag = async;
    n->kids.push_back(target_list());
    expect_kw("in");
    n->kids.push_back(star_expressions());
    n->kids.push_back(block());
    n->kids.push_back(accept_kw("else") ? block() : make_seq());
    finish(*n, b);
    return n;
  }

  NodePtr try_stmt() {
    std::uint32_t b = cur().begin;
    advance();
    auto body = block();
    auto handlers = make_seq();
    int star = -1;
    while (at_kw("except")) {
      std::uint32_t hb = cur().begin;
      advance();
      bool is_star = accept_op("*");
      if (star >= 0 && star != static_cast<int>(is_star))
        error("cannot have both 'except' and 'except*' on the same 'try'");
      star = is_star;
      auto h = make_node(NodeKind::ExceptHandler);
      if (!at_op(":")) {
        h->kids.push_back(expression());
        if (accept_kw("as")) h->text = expect_name();
      } else {
        if (is_star) error("expected one or more exception types");
        h->kids.push_back(nullptr);
      }
      h->kids.push_back(block());
      finish(*h, hb);
      handlers->kids.push_back(std::move(h));
    }
    fit_seq(*handlers);
    auto orelse = make_seq();
    if (at_kw("else")) {
      if (handlers->kids.empty()) error("invalid syntax");
      advance();
      orelse = block();
    }
    auto finalbody = make_seq();
    if (accept_kw("finally")) finalbody = block();
    if (handlers->kids.empty() && finalbody->kids.empty()) error("expected 'except' or 'finally' block");
    auto n = make_node(star == 1 ? NodeKind::TryStar : NodeKind::Try);
    n->kids.push_back(std::move(body));
    n->kids.push_back(std::move(handlers));
    n->kids.push_back(std::move(orelse));
    n->kids.push_back(std::move(finalbody));
    finish(*n, b);
    return n;
  }

  NodePtr with_item() {
    std::uint32_t b = cur().begin;
    auto item = make_node(NodeKind::WithItem);
    item->kids.push_back(expression());
    if (accept_kw("as")) {
      auto target = at_op("*") ? star_expression() : bitwise_or();
      check_target(*target);
      item->kids.push_back(std::move(target));
    } else {
      item->kids.push_back(nullptr);
    }
    finish(*item, b);
    return item;
  }

  NodePtr with_stmt(bool async, std::uint32_t b) {
    expect_kw("with");
    auto items = make_seq();
    if (at_op("(")) {
      std::size_t save = pos_;
      std::uint32_t save_end = prev_end_;
      try {
        advance();
        do {
          if (at_op(")")) break;
          items->kids.push_back(with_item());
        } while (accept_op(","));
        expect_op(")");
        if (!at_op(":") || items->kids.empty()) throw SyntaxError("", 0);
      } catch (const SyntaxError&) {
        pos_ = save;
        prev_end_ = save_end;
        items->kids.clear();
      }
    }
    if (items->kids.empty()) {
      do items->kids.push_back(with_item());
      while (accept_op(","));
    }
    fit_seq(*items);
    auto n = make_node(NodeKind::With);
    n->flag = async;
    n->kids.push_back(std::move(items));
    n->kids.push_back(block());
    finish(*n, b);
    return n;
  }

  NodePtr decorated() {
    std::uint32_t b = cur().begin;
    auto decorators = make_seq();
    while (accept_op("@")) {
      decorators->kids.push_back(named_expression());
      expect_newline();
    }
    fit_seq(*decorators);
    if (at_kw("def")) return funcdef(std::move(decorators), b, false);
    if (at_kw("class")) return classdef(std::move(decorators), b);
    if (accept_kw("async") && at_kw("def")) return funcdef(std::move(decorators), b, true);
    error("invalid syntax");
  }

  NodePtr funcdef(NodePtr decorators, std::uint32_t b, bool async) {
    expect_kw("def");
    auto n = make_node(NodeKind::FunctionDef);
    n->flag = async;
    n->text = expect_name();
    auto tparams = type_params();
    expect_op("(");
    auto args = parameters(")", true);
    expect_op(")");
    NodePtr returns = accept_op("->") ? expression() : nullptr;
    n->kids.push_back(std::move(decorators));
    n->kids.push_back(std::move(args));
    n->kids.push_back(std::move(returns));
    n->kids.push_back(block());
    n->kids.push_back(std::move(tparams));
    finish(*n, b);
    return n;
  }

  NodePtr classdef(NodePtr decorators, std::uint32_t b) {
    expect_kw("class");
    auto n = make_node(NodeKind::ClassDef);
    n->text = expect_name();
    auto tparams = type_params();
    auto bases = make_seq();
    auto keywords = make_seq();
    if (accept_op("(")) {
      call_arguments(*bases, *keywords);
      expect_op(")");
    }
    n->kids.push_back(std::move(decorators));
    n->kids.push_back(std::move(bases));
    n->kids.push_back(std::move(keywords));
    n->kids.push_back(block());
    n->kids.push_back(std::move(tparams));
    finish(*n, b);
    return n;
  }

  NodePtr param(bool annotated, bool star_annotation) {
    std::uint32_t b = cur().begin;
    auto a = make_node(NodeKind::Arg);
    if (cur().kind == TokenKind::Hole && template_) {
      a->hole = hole_spec(advance());
      a->text = a->hole->binder;
    } else {
      a->text = expect_name();
    }
    NodePtr ann;
    if (annotated && accept_op(":")) ann = star_annotation && at_op("*") ? star_expression() : expression();
    a->kids.push_back(std::move(ann));
    finish(*a, b);
    return a;
  }

  // Parameters up to (not including) `terminator`.
  NodePtr parameters(std::string_view terminator, bool annotated) {
    std::uint32_t b = cur().begin;
    auto posonly = make_seq(), args = make_seq(), kwonly = make_seq(), kw_defaults = make_seq(),
         defaults = make_seq();
    NodePtr vararg, kwarg;
    bool seen_star = false, seen_slash = false;
    while (!at_op(terminator)) {
      if (kwarg) error("arguments cannot follow var-keyword argument");
      if (at_op("/")) {
        if (seen_slash || seen_star || args->kids.empty()) error("invalid '/' in parameters");
        advance();
        seen_slash = true;
        for (auto& a : args->kids) posonly->kids.push_back(std::move(a));
        args->kids.clear();
      } else if (at_op("*")) {
        if (seen_star) error("* argument may appear only once");
        advance();
        seen_star = true;
        if (!at_op(",") && !at_op(terminator)) vararg = param(annotated, true);
      } else if (at_op("**")) {
        advance();
        kwarg = param(annotated, false);
      } else {
        auto p = param(annotated, false);
        NodePtr dflt = accept_op("=") ? expression() : nullptr;
        if (!seen_star) {
          if (dflt) defaults->kids.push_back(std::move(dflt));
          else if (!defaults->kids.empty()) error_at("non-default argument follows default argument", p->span.begin);
          args->kids.push_back(std::move(p));
        } else {
          kwonly->kids.push_back(std::move(p));
          kw_defaults->kids.push_back(std::move(dflt));
        }
      }
      if (!accept_op(",")) break;
    }
    if (seen_star && !vararg && kwonly->kids.empty()) error("named arguments must follow bare *");
    auto n = make_node(NodeKind::Arguments);
    for (auto* s : {&posonly, &args}) fit_seq(**s);
    fit_seq(*kwonly);
    fit_seq(*defaults);
    n->kids.push_back(std::move(posonly));
    n->kids.push_back(std::move(args));
    n->kids.push_back(std::move(vararg));
    n->kids.push_back(std::move(kwonly));
    n->kids.push_back(std::move(kw_defaults));
    n->kids.push_back(std::move(kwarg));
    n->kids.push_back(std::move(defaults));
    if (prev_end_ >= b && pos_ > 0 && toks_[pos_ - 1].begin >= b) finish(*n, b);
    return n;
  }

  // --- match statement ---------------------------------------------------
  NodePtr try_match_stmt() {
    std::size_t save = pos_;
    std::uint32_t save_end = prev_end_;
    std::uint32_t b = cur().begin;
    NodePtr subject;
    auto restore = [&] {
      pos_ = save;
      prev_end_ = save_end;
      return nullptr;
    };
    try {
      advance();
      subject = subject_expr();
    } catch (const SyntaxError&) {
      return restore();
    }
    if (!at_op(":") || peek().kind != TokenKind::Newline || peek(2).kind != TokenKind::Indent ||
        !is_kw(peek(3), "case"))
      return restore();
    advance();
    advance();
    advance();
    auto cases = make_seq();
    while (at_kw("case")) cases->kids.push_back(case_block());
    if (cur().kind != TokenKind::Dedent) error("expected 'case' block");
    advance();
    fit_seq(*cases);
    auto n = make_node(NodeKind::Match);
    n->kids.push_back(std::move(subject));
    n->kids.push_back(std::move(cases));
    finish(*n, b);
    return n;
  }

  NodePtr subject_expr() {
    std::uint32_t b = cur().begin;
    auto first = star_named_expression();
    if (!at_op(",")) {
      if (first->kind == NodeKind::Starred) error("invalid match subject");
      return first;
    }
    auto t = make_node(NodeKind::Tuple);
    t->kids.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op(":")) break;
      t->kids.push_back(star_named_expression());
    }
    finish(*t, b);
    return t;
  }

  NodePtr case_block() {
    std::uint32_t b = cur().begin;
    advance();
    auto c = make_node(NodeKind::MatchCase);
    c->kids.push_back(patterns());
    c->kids.push_back(accept_kw("if") ? named_expression() : nullptr);
    c->kids.push_back(block());
    finish(*c, b);
    return c;
  }

  NodePtr patterns() {
    std::uint32_t b = cur().begin;
    auto first = maybe_star_pattern();
    if (!at_op(",")) return first;
    auto seq = make_node(NodeKind::MatchSequence);
    seq->kids.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op(":") || at_kw("if")) break;
      seq->kids.push_back(maybe_star_pattern());
    }
    finish(*seq, b);
    return seq;
  }

  NodePtr maybe_star_pattern() {
    if (!at_op("*")) return pattern();
    std::uint32_t b = cur().begin;
    advance();
    auto s = make_node(NodeKind::MatchStar);
    std::string name = expect_name();
    if (name != "_") {
      s->text = name;
      s->flag = true;
    }
    finish(*s, b);
    return s;
  }

  NodePtr pattern() {
    DepthGuard guard(*this);
    std::uint32_t b = cur().begin;
    auto p = or_pattern();
    if (!accept_kw("as")) return p;
    auto as = make_node(NodeKind::MatchAs);
    as->text = expect_name();
    if (as->text == "_") error("cannot use '_' as a target");
    as->flag = true;
    as->kids.push_back(std::move(p));
    finish(*as, b);
    return as;
  }

  NodePtr or_pattern() {
    std::uint32_t b = cur().begin;
    auto first = closed_pattern();
    if (!at_op("|")) return first;
    auto n = make_node(NodeKind::MatchOr);
    n->kids.push_back(std::move(first));
    while (accept_op("|")) n->kids.push_back(closed_pattern());
    finish(*n, b);
    return n;
  }

  NodePtr signed_number() {
    std::uint32_t b = cur().begin;
    if (accept_op("-")) {
      if (cur().kind != TokenKind::Number) error("expected number");
      auto u = make_node(NodeKind::UnaryOp);
      u->text = "-";
      u->kids.push_back(atom());
      finish(*u, b);
      return u;
    }
    if (cur().kind != TokenKind::Number) error("expected number");
    return atom();
  }

  NodePtr literal_pattern_expr() {
    std::uint32_t b = cur().begin;
    if (cur().kind == TokenKind::String) {
      auto s = strings();
      if (s->kind == NodeKind::JoinedStr) error_at("patterns may not match formatted string literals", b);
      return s;
    }
    auto left = signed_number();
    if ((at_op("+") || at_op("-")) && peek().kind == TokenKind::Number) {
      auto bin = make_node(NodeKind::BinOp);
      bin->text = std::string(advance().text);
      bin->kids.push_back(std::move(left));
      bin->kids.push_back(atom());
      finish(*bin, b);
      return bin;
    }
    return left;
  }

  NodePtr name_or_attr() {
    std::uint32_t b = cur().begin;
    auto n = make_name(expect_name());
    finish(*n, b);
    while (accept_op(".")) {
      auto a = make_node(NodeKind::Attribute);
      a->text = expect_name();
      a->kids.push_back(std::move(n));
      finish(*a, b);
      n = std::move(a);
    }
    return n;
  }

  NodePtr closed_pattern() {
    const Token& t = cur();
    std::uint32_t b = t.begin;
    if (t.kind == TokenKind::Number || t.kind == TokenKind::String || (is_op(t, "-") && peek().kind == TokenKind::Number)) {
      auto v = make_node(NodeKind::MatchValue);
      v->kids.push_back(literal_pattern_expr());
      finish(*v, b);
      return v;
    }
    if (is_kw(t, "None") || is_kw(t, "True") || is_kw(t, "False")) {
      advance();
      auto s = node(NodeKind::MatchSingleton, b);
      s->constant = t.text == "None" ? ConstKind::None : t.text == "True" ? ConstKind::True : ConstKind::False;
      return s;
    }
    if (t.kind == TokenKind::Name && !is_keyword(t.text)) {
      if (t.text == "_" && !is_op(peek(), ".") && !is_op(peek(), "(")) {
        advance();
        return node(NodeKind::MatchAs, b);
      }
      auto target = name_or_attr();
      if (at_op("(")) return class_pattern(std::move(target), b);
      if (target->kind == NodeKind::Attribute) {
        auto v = make_node(NodeKind::MatchValue);
        v->kids.push_back(std::move(target));
        finish(*v, b);
        return v;
      }
      auto as = make_node(NodeKind::MatchAs);
      as->text = target->text;
      as->flag = true;
      finish(*as, b);
      return as;
    }
    if (is_op(t, "(") || is_op(t, "[")) {
      bool paren = is_op(t, "(");
      std::string_view close = paren ? ")" : "]";
      advance();
      auto seq = make_node(NodeKind::MatchSequence);
      if (accept_op(close)) {
        finish(*seq, b);
        return seq;
      }
      auto first = maybe_star_pattern();
      if (paren && at_op(")") && first->kind != NodeKind::MatchStar) {
        advance();
        return first;
      }
      seq->kids.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op(close)) break;
        seq->kids.push_back(maybe_star_pattern());
      }
      expect_op(close);
      finish(*seq, b);
      return seq;
    }
    if (is_op(t, "{")) return mapping_pattern();
    error("invalid pattern");
  }

  NodePtr mapping_pattern() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::MatchMapping);
    auto keys = make_seq(), pats = make_seq();
    while (!at_op("}")) {
      if (accept_op("**")) {
        n->text = expect_name();
        n->flag = true;
        accept_op(",");
        break;
      }
      const Token& t = cur();
      if (is_kw(t, "None") || is_kw(t, "True") || is_kw(t, "False")) {
        keys->kids.push_back(atom());
      } else if (t.kind == TokenKind::Name) {
        auto k = name_or_attr();
        if (k->kind != NodeKind::Attribute) error_at("mapping pattern keys may only match literals and attribute lookups", t.begin);
        keys->kids.push_back(std::move(k));
      } else {
        keys->kids.push_back(literal_pattern_expr());
      }
      expect_op(":");
      pats->kids.push_back(pattern());
      if (!accept_op(",")) break;
    }
    expect_op("}");
    fit_seq(*keys);
    fit_seq(*pats);
    n->kids.push_back(std::move(keys));
    n->kids.push_back(std::move(pats));
    finish(*n, b);
    return n;
  }

  NodePtr class_pattern(NodePtr cls, std::uint32_t b) {
    expect_op("(");
    auto n = make_node(NodeKind::MatchClass);
    auto pats = make_seq(), kwds = make_seq();
    while (!at_op(")")) {
      if (cur().kind == TokenKind::Name && is_op(peek(), "=")) {
        n->ops.push_back(expect_name());
        advance();
        kwds->kids.push_back(pattern());
      } else {
        if (!kwds->kids.empty()) error("positional patterns follow keyword patterns");
        pats->kids.push_back(pattern());
      }
      if (!accept_op(",")) break;
    }
    expect_op(")");
    fit_seq(*pats);
    fit_seq(*kwds);
    n->kids.push_back(std::move(cls));
    n->kids.push_back(std::move(pats));
    n->kids.push_back(std::move(kwds));
    finish(*n, b);
    return n;
  }

  // --- expressions -------------------------------------------------------
 public:
  NodePtr star_expressions() {
    std::uint32_t b = cur().begin;
    auto first = star_expression();
    if (!at_op(",")) return first;
    auto t = make_node(NodeKind::Tuple);
    t->kids.push_back(std::move(first));
    while (accept_op(",")) {
      if (!starts_expression() || at_kw("yield")) break;
      t->kids.push_back(star_expression());
    }
    finish(*t, b);
    return t;
  }

 private:
  NodePtr star_expression() {
    if (!at_op("*")) return expression();
    std::uint32_t b = cur().begin;
    advance();
    auto s = make_node(NodeKind::Starred);
    s->kids.push_back(bitwise_or());
    finish(*s, b);
    return s;
  }

  NodePtr star_named_expression() {
    if (!at_op("*")) return named_expression();
    return star_expression();
  }

  NodePtr named_expression() {
    if (cur().kind == TokenKind::Name && !is_keyword(cur().text) && is_op(peek(), ":=")) {
      std::uint32_t b = cur().begin;
      auto target = make_name(std::string(advance().text));
      finish(*target, b);
      advance();
      auto n = make_node(NodeKind::NamedExpr);
      n->kids.push_back(std::move(target));
      n->kids.push_back(expression());
      finish(*n, b);
      return n;
    }
    return expression();
  }

  NodePtr yield_expr() {
    std::uint32_t b = cur().begin;
    advance();
    if (accept_kw("from")) {
      auto n = make_node(NodeKind::YieldFrom);
      n->kids.push_back(expression());
      finish(*n, b);
      return n;
    }
    auto n = make_node(NodeKind::Yield);
    n->kids.push_back(starts_expression() && !at_kw("yield") ? star_expressions() : nullptr);
    finish(*n, b);
    return n;
  }

  NodePtr expression() {
    DepthGuard guard(*this);
    if (at_kw("lambda")) return lambda();
    std::uint32_t b = cur().begin;
    auto body = disjunction();
    if (!at_kw("if")) return body;
    advance();
    auto n = make_node(NodeKind::IfExp);
    auto test = disjunction();
    expect_kw("else");
    auto orelse = expression();
    n->kids.push_back(std::move(test));
    n->kids.push_back(std::move(body));
    n->kids.push_back(std::move(orelse));
    finish(*n, b);
    return n;
  }

  NodePtr lambda() {
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::Lambda);
    n->kids.push_back(parameters(":", false));
    expect_op(":");
    n->kids.push_back(expression());
    finish(*n, b);
    return n;
  }

  NodePtr boolop(std::string_view op, NodePtr (Parser::*operand)()) {
    std::uint32_t b = cur().begin;
    auto first = (this->*operand)();
    if (!at_kw(op)) return first;
    auto n = make_node(NodeKind::BoolOp);
    n->text = std::string(op);
    n->kids.push_back(std::move(first));
    while (accept_kw(op)) n->kids.push_back((this->*operand)());
    finish(*n, b);
    return n;
  }

  NodePtr disjunction() { return boolop("or", &Parser::conjunction); }
  NodePtr conjunction() { return boolop("and", &Parser::inversion); }

  NodePtr inversion() {
    if (!at_kw("not")) return comparison();
    DepthGuard guard(*this);
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::UnaryOp);
    n->text = "not";
    n->kids.push_back(inversion());
    finish(*n, b);
    return n;
  }

  std::string compare_op() {
    const Token& t = cur();
    if (t.kind == TokenKind::Op) {
      if (t.text == "==" || t.text == "!=" || t.text == "<" || t.text == "<=" || t.text == ">" || t.text == ">=")
        return std::string(t.text);
      return {};
    }
    if (is_kw(t, "in")) return "in";
    if (is_kw(t, "not") && is_kw(peek(), "in")) return "not in";
    if (is_kw(t, "is")) return is_kw(peek(), "not") ? "is not" : "is";
    return {};
  }

  NodePtr comparison() {
    std::uint32_t b = cur().begin;
    auto left = bitwise_or();
    std::string op = compare_op();
    if (op.empty()) return left;
    auto n = make_node(NodeKind::Compare);
    n->kids.push_back(std::move(left));
    while (!op.empty()) {
      advance();
      if (op == "not in" || op == "is not") advance();
      n->ops.push_back(op);
      n->kids.push_back(bitwise_or());
      op = compare_op();
    }
    finish(*n, b);
    return n;
  }

  template <typename Next>
  NodePtr binary(std::initializer_list<std::string_view> ops, Next next) {
    std::uint32_t b = cur().begin;
    auto left = next();
    while (cur().kind == TokenKind::Op &&
           std::find(ops.begin(), ops.end(), cur().text) != ops.end()) {
      auto n = make_node(NodeKind::BinOp);
      n->text = std::string(advance().text);
      n->kids.push_back(std::move(left));
      n->kids.push_back(next());
      finish(*n, b);
      left = std::move(n);
    }
    return left;
  }

  NodePtr bitwise_or() { return binary({"|"}, [this] { return bitwise_xor(); }); }
  NodePtr bitwise_xor() { return binary({"^"}, [this] { return bitwise_and(); }); }
  NodePtr bitwise_and() { return binary({"&"}, [this] { return shift_expr(); }); }
  NodePtr shift_expr() { return binary({"<<", ">>"}, [this] { return sum(); }); }
  NodePtr sum() { return binary({"+", "-"}, [this] { return term(); }); }
  NodePtr term() { return binary({"*", "/", "//", "%", "@"}, [this] { return factor(); }); }

  NodePtr factor() {
    if (at_op("+") || at_op("-") || at_op("~")) {
      DepthGuard guard(*this);
      std::uint32_t b = cur().begin;
      auto n = make_node(NodeKind::UnaryOp);
      n->text = std::string(advance().text);
      n->kids.push_back(factor());
      finish(*n, b);
      return n;
    }
    return power();
  }

  NodePtr power() {
    std::uint32_t b = cur().begin;
    auto base = await_primary();
    if (!at_op("**")) return base;
    advance();
    auto n = make_node(NodeKind::BinOp);
    n->text = "**";
    n->kids.push_back(std::move(base));
    n->kids.push_back(factor());
    finish(*n, b);
    return n;
  }

  NodePtr await_primary() {
    if (!at_kw("await")) return primary();
    std::uint32_t b = cur().begin;
    advance();
    auto n = make_node(NodeKind::Await);
    n->kids.push_back(primary());
    finish(*n, b);
    return n;
  }

  NodePtr primary() {
    std::uint32_t b = cur().begin;
    auto e = atom();
    while (true) {
      if (at_op(".")) {
        advance();
        auto a = make_node(NodeKind::Attribute);
        a->text = expect_name();
        a->kids.push_back(std::move(e));
        finish(*a, b);
        e = std::move(a);
      } else if (at_op("(")) {
        advance();
        auto c = make_node(NodeKind::Call);
        auto args = make_seq(), kws = make_seq();
        call_arguments(*args, *kws);
        expect_op(")");
        c->kids.push_back(std::move(e));
        c->kids.push_back(std::move(args));
        c->kids.push_back(std::move(kws));
        finish(*c, b);
        e = std::move(c);
      } else if (at_op("[")) {
        advance();
        auto s = make_node(NodeKind::Subscript);
        s->kids.push_back(std::move(e));
        s->kids.push_back(slices());
        expect_op("]");
        finish(*s, b);
        e = std::move(s);
      } else {
        return e;
      }
    }
  }

  void call_arguments(Node& args, Node& keywords) {
    bool seen_keyword = false;
    while (!at_op(")")) {
      std::uint32_t b = cur().begin;
      if (at_op("*")) {
        advance();
        auto s = make_node(NodeKind::Starred);
        s->kids.push_back(expression());
        finish(*s, b);
        args.kids.push_back(std::move(s));
      } else if (at_op("**")) {
        advance();
        auto k = make_node(NodeKind::Keyword);
        k->kids.push_back(expression());
        finish(*k, b);
        keywords.kids.push_back(std::move(k));
        seen_keyword = true;
      } else if (cur().kind == TokenKind::Name && is_op(peek(), "=")) {
        auto k = make_node(NodeKind::Keyword);
        k->text = expect_name();
        advance();
        k->kids.push_back(expression());
        finish(*k, b);
        keywords.kids.push_back(std::move(k));
        seen_keyword = true;
      } else {
        if (seen_keyword) error("positional argument follows keyword argument");
        auto e = named_expression();
        if (at_kw("for") || (at_kw("async") && is_kw(peek(), "for"))) {
          auto g = make_node(NodeKind::GeneratorExp);
          g->kids.push_back(std::move(e));
          comprehension_clauses(*g);
          finish(*g, b);
          e = std::move(g);
        }
        args.kids.push_back(std::move(e));
      }
      if (!accept_op(",")) break;
    }
    fit_seq(args);
    fit_seq(keywords);
  }

  NodePtr slice() {
    std::uint32_t b = cur().begin;
    NodePtr lower;
    if (!at_op(":")) {
      if (at_op("*")) return star_expression();
      lower = named_expression();
      if (!at_op(":")) return lower;
    }
    advance();
    auto s = make_node(NodeKind::Slice);
    auto bound = [&]() -> NodePtr {
      if (at_op(":") || at_op("]") || at_op(",")) return nullptr;
      return expression();
    };
    s->kids.push_back(std::move(lower));
    s->kids.push_back(bound());
    s->kids.push_back(accept_op(":") ? bound() : nullptr);
    finish(*s, b);
    return s;
  }

  NodePtr slices() {
    std::uint32_t b = cur().begin;
    auto first = slice();
    if (!at_op(",")) return first;
    auto t = make_node(NodeKind::Tuple);
    t->kids.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("]")) break;
      t->kids.push_back(slice());
    }
    finish(*t, b);
    return t;
  }

  void comprehension_clauses(Node& comp) {
    while (at_kw("for") || (at_kw("async") && is_kw(peek(), "for"))) {
      std::uint32_t b = cur().begin;
      auto c = make_node(NodeKind::Comprehension);
      c->flag = accept_kw("async");
      expect_kw("for");
      c->kids.push_back(target_list());
      expect_kw("in");
      c->kids.push_back(disjunction());
      while (accept_kw("if")) c->kids.push_back(disjunction());
      finish(*c, b);
      comp.kids.push_back(std::move(c));
    }
  }

  NodePtr strings() {
    std::uint32_t b = cur().begin;
    std::vector<std::string_view> raw;
    bool any_f = false, any_bytes = false, any_str = false, opaque = false;
    std::string value;
    while (cur().kind == TokenKind::String) {
      const Token& t = advance();
      detail::StringValue v;
      try {
        v = detail::decode_string(t.text);
      } catch (const std::invalid_argument& e) {
        error_at(e.what(), t.begin);
      }
      raw.push_back(t.text);
      any_f |= v.fstring;
      (v.bytes ? any_bytes : any_str) = true;
      opaque |= v.opaque;
      value += v.value;
    }
    if (any_bytes && (any_str || any_f)) error_at("cannot mix bytes and nonbytes literals", b);
    if (any_f) {
      auto n = node(NodeKind::JoinedStr, b);
      for (auto r : raw) n->ops.emplace_back(r);
      return n;
    }
    auto n = node(NodeKind::Constant, b);
    n->constant = any_bytes ? ConstKind::Bytes : ConstKind::Str;
    n->text = std::move(value);
    if (opaque) {
      for (auto r : raw) {
        if (!n->text2.empty()) n->text2 += ' ';
        n->text2 += r;
      }
    }
    return n;
  }

  HoleSpec hole_spec(const Token& t) const {
    std::string_view body = t.text.substr(2, t.text.size() - 3);
    auto trim = [](std::string_view s) {
      while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
      while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
      return s;
    };
    body = trim(body);
    HoleSpec h;
    auto kind_of = [&](std::string_view k) -> std::optional<HoleKind> {
      if (k == "expr") return HoleKind::Expr;
      if (k == "Name") return HoleKind::Name;
      if (k == "Constant(int)") return HoleKind::ConstantInt;
      if (k == "Constant(str)") return HoleKind::ConstantStr;
      if (k == "Lambda") return HoleKind::Lambda;
      if (k == "FuncName") return HoleKind::FuncName;
      return std::nullopt;
    };
    if (!body.empty() && body.front() == '$') {
      h.fresh = true;
      h.binder = std::string(trim(body.substr(1)));
      if (h.binder.empty()) error_at("empty fresh-name hole", t.begin);
      return h;
    }
    auto colon = body.find(':');
    if (colon == std::string_view::npos) {
      if (auto k = kind_of(body)) {
        h.kind = *k;
        return h;
      }
      h.reference = true;
      h.binder = std::string(body);
      if (h.binder.empty()) error_at("empty hole", t.begin);
      return h;
    }
    auto k = kind_of(trim(body.substr(0, colon)));
    if (!k) error_at("unknown hole kind", t.begin);
    h.kind = *k;
    h.binder = std::string(trim(body.substr(colon + 1)));
    return h;
  }

  NodePtr atom() {
    DepthGuard guard(*this);
    const Token& t = cur();
    std::uint32_t b = t.begin;
    switch (t.kind) {
      case TokenKind::Name: {
        if (t.text == "True" || t.text == "False" || t.text == "None") {
          advance();
          auto c = node(NodeKind::Constant, b);
          c->constant = t.text == "True" ? ConstKind::True : t.text == "False" ? ConstKind::False : ConstKind::None;
          return c;
        }
        if (is_keyword(t.text)) error("invalid syntax");
        advance();
        auto n = node(NodeKind::Name, b);
        n->text = std::string(t.text);
        return n;
      }
      case TokenKind::Number: {
        advance();
        auto c = node(NodeKind::Constant, b);
        try {
          auto v = detail::decode_number(t.text);
          c->constant = v.kind;
          c->text = std::move(v.text);
        } catch (const std::invalid_argument&) {
          error_at("invalid number literal", b);
        }
        return c;
      }
      case TokenKind::String: return strings();
      case TokenKind::Hole: {
        if (!template_) error("invalid syntax");
        advance();
        auto h = node(NodeKind::Hole, b);
        h->hole = hole_spec(t);
        h->text = h->hole->binder;
        return h;
      }
      case TokenKind::Op: break;
      default: error("invalid syntax");
    }
    if (accept_op("...")) {
      auto c = node(NodeKind::Constant, b);
      c->constant = ConstKind::Ellipsis;
      return c;
    }
    if (accept_op("(")) {
      if (accept_op(")")) return node(NodeKind::Tuple, b);
      if (at_kw("yield")) {
        auto y = yield_expr();
        expect_op(")");
        return y;
      }
      auto first = star_named_expression();
      if (at_kw("for") || (at_kw("async") && is_kw(peek(), "for"))) {
        auto g = make_node(NodeKind::GeneratorExp);
        g->kids.push_back(std::move(first));
        comprehension_clauses(*g);
        expect_op(")");
        finish(*g, b);
        return g;
      }
      if (accept_op(")")) {
        if (first->kind == NodeKind::Starred) error_at("cannot use starred expression here", first->span.begin);
        return first;
      }
      auto tup = make_node(NodeKind::Tuple);
      tup->kids.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op(")")) break;
        tup->kids.push_back(star_named_expression());
      }
      expect_op(")");
      finish(*tup, b);
      return tup;
    }
    if (accept_op("[")) {
      auto list = make_node(NodeKind::List);
      if (accept_op("]")) {
        finish(*list, b);
        return list;
      }
      auto first = star_named_expression();
      if (at_kw("for") || (at_kw("async") && is_kw(peek(), "for"))) {
        auto lc = make_node(NodeKind::ListComp);
        lc->kids.push_back(std::move(first));
        comprehension_clauses(*lc);
        expect_op("]");
        finish(*lc, b);
        return lc;
      }
      list->kids.push_back(std::move(first));
      while (accept_op(",")) {
        if (at_op("]")) break;
        list->kids.push_back(star_named_expression());
      }
      expect_op("]");
      finish(*list, b);
      return list;
    }
    if (accept_op("{")) return brace_display(b);
    error("invalid syntax");
  }

  NodePtr brace_display(std::uint32_t b) {
    if (accept_op("}")) {
      auto d = node(NodeKind::Dict, b);
      d->kids.push_back(make_seq());
      d->kids.push_back(make_seq());
      return d;
    }
    auto dict_rest = [&](NodePtr key, NodePtr value) {
      auto d = make_node(NodeKind::Dict);
      auto keys = make_seq(), values = make_seq();
      keys->kids.push_back(std::move(key));
      values->kids.push_back(std::move(value));
      while (accept_op(",")) {
        if (at_op("}")) break;
        if (accept_op("**")) {
          keys->kids.push_back(nullptr);
          values->kids.push_back(bitwise_or());
        } else {
          keys->kids.push_back(expression());
          expect_op(":");
          values->kids.push_back(expression());
        }
      }
      expect_op("}");
      fit_seq(*keys);
      fit_seq(*values);
      d->kids.push_back(std::move(keys));
      d->kids.push_back(std::move(values));
      finish(*d, b);
      return d;
    };
    if (accept_op("**")) return dict_rest(nullptr, bitwise_or());
    auto first = star_named_expression();
    if (first->kind != NodeKind::Starred && accept_op(":")) {
      auto value = expression();
      if (at_kw("for") || (at_kw("async") && is_kw(peek(), "for"))) {
        auto dc = make_node(NodeKind::DictComp);
        dc->kids.push_back(std::move(first));
        dc->kids.push_back(std::move(value));
        comprehension_clauses(*dc);
        expect_op("}");
        finish(*dc, b);
        return dc;
      }
      return dict_rest(std::move(first), std::move(value));
    }
    if (at_kw("for") || (at_kw("async") && is_kw(peek(), "for"))) {
      auto sc = make_node(NodeKind::SetComp);
      sc->kids.push_back(std::move(first));
      comprehension_clauses(*sc);
      expect_op("}");
      finish(*sc, b);
      return sc;
    }
    auto set = make_node(NodeKind::Set);
    set->kids.push_back(std::move(first));
    while (accept_op(",")) {
      if (at_op("}")) break;
      set->kids.push_back(star_named_expression());
    }
    expect_op("}");
    finish(*set, b);
    return set;
  }

  std::string_view src_;
  std::vector<Token> toks_;
  bool template_;
  std::size_t pos_ = 0;
  std::uint32_t prev_end_ = 0;
  int depth_ = 0;
};

ParseFailure failure_at(std::string_view text, std::uint32_t offset, std::string msg) {
  LineIndex idx(text);
  auto lc = idx.locate(offset);
  return ParseFailure{lc.line, lc.col, offset, std::move(msg)};
}

ParseResult run(std::string_view text, bool tmpl) {
  try {
    Parser p(text, detail::tokenize(text, tmpl), tmpl);
    Module m;
    m.source = std::string(text);
    m.root = p.file();
    return m;
  } catch (const SyntaxError& e) {
    return failure_at(text, e.offset, e.what());
  }
}

}  // namespace

ParseResult parse_module(const SourceText& src) { return run(src.text, false); }
ParseResult parse_module(std::string_view text) { return run(text, false); }
ParseResult parse_template(std::string_view text) { return run(text, true); }

std::variant<NodePtr, ParseFailure> parse_expression(std::string_view text, bool template_mode) {
  try {
    Parser p(text, detail::tokenize(text, template_mode), template_mode);
    return p.single_expression();
  } catch (const SyntaxError& e) {
    return failure_at(text, e.offset, e.what());
  }
}

}  // namespace cellrw::syntax
