#include "cellrw/syntax/ast.hpp"

#include <array>

namespace cellrw::syntax {

namespace {

constexpr std::array<std::string_view, static_cast<std::size_t>(NodeKind::Hole) + 1> kKindNames = {
    "Module",        "FunctionDef",  "ClassDef",      "Return",       "Delete",   "Assign",
    "AugAssign",     "AnnAssign",    "For",           "While",        "If",       "With",
    "Match",         "Raise",        "Try",           "TryStar",      "Assert",   "Import",
    "ImportFrom",    "Global",       "Nonlocal",      "Expr",         "Pass",     "Break",
    "Continue",      "TypeAlias",    "BoolOp",        "NamedExpr",    "BinOp",    "UnaryOp",
    "Lambda",        "IfExp",        "Dict",          "Set",          "ListComp", "SetComp",
    "DictComp",      "GeneratorExp", "Await",         "Yield",        "YieldFrom", "Compare",
    "Call",          "JoinedStr",    "Constant",      "Attribute",    "Subscript", "Starred",
    "Name",          "List",         "Tuple",         "Slice",        "Seq",      "Arguments",
    "Arg",           "Keyword",      "Alias",         "WithItem",     "ExceptHandler",
    "Comprehension", "MatchCase",    "MatchValue",    "MatchSingleton", "MatchSequence",
    "MatchMapping",  "MatchClass",   "MatchStar",     "MatchAs",      "MatchOr",  "TypeVar",
    "ParamSpec",     "TypeVarTuple", "Hole",
};

}  // namespace

std::string_view kind_name(NodeKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

bool is_statement(NodeKind k) { return k >= NodeKind::FunctionDef && k <= NodeKind::TypeAlias; }

bool is_expression(NodeKind k) {
  return (k >= NodeKind::BoolOp && k <= NodeKind::Slice) || k == NodeKind::Hole;
}

std::string_view hole_kind_name(HoleKind k) {
  switch (k) {
    case HoleKind::Expr: return "expr";
    case HoleKind::Name: return "Name";
    case HoleKind::ConstantInt: return "Constant(int)";
    case HoleKind::ConstantStr: return "Constant(str)";
    case HoleKind::Lambda: return "Lambda";
    case HoleKind::FuncName: return "FuncName";
  }
  return "?";
}

NodePtr make_node(NodeKind k, Span span) {
  auto n = std::make_unique<Node>(k);
  n->span = span;
  return n;
}

NodePtr make_name(std::string id) {
  auto n = make_node(NodeKind::Name);
  n->text = std::move(id);
  return n;
}

NodePtr make_seq(std::vector<NodePtr> items) {
  auto n = make_node(NodeKind::Seq);
  n->kids = std::move(items);
  return n;
}

NodePtr make_str(std::string value) {
  auto n = make_node(NodeKind::Constant);
  n->constant = ConstKind::Str;
  n->text = std::move(value);
  return n;
}

NodePtr make_int(long long value) {
  auto n = make_node(NodeKind::Constant);
  n->constant = ConstKind::Int;
  n->text = std::to_string(value);
  return n;
}

NodePtr clone(const Node& n, bool drop_spans) {
  auto c = std::make_unique<Node>(n.kind);
  c->span = drop_spans ? Span{} : n.span;
  c->text = n.text;
  c->text2 = n.text2;
  c->constant = n.constant;
  c->flag = n.flag;
  c->level = n.level;
  c->ops = n.ops;
  c->hole = n.hole;
  c->kids.reserve(n.kids.size());
  for (const auto& k : n.kids) c->kids.push_back(k ? clone(*k, drop_spans) : nullptr);
  return c;
}

void walk(const Node& n, const std::function<void(const Node&)>& fn) {
  fn(n);
  for (const auto& k : n.kids)
    if (k) walk(*k, fn);
}

void walk_pruned(const Node& n, const std::function<bool(const Node&)>& fn) {
  if (!fn(n)) return;
  for (const auto& k : n.kids)
    if (k) walk_pruned(*k, fn);
}

std::vector<const Node*> nested_bodies(const Node& s) {
  std::vector<const Node*> out;
  auto add = [&](const Node* seq) {
    if (seq) out.push_back(seq);
  };
  switch (s.kind) {
    case NodeKind::FunctionDef:
    case NodeKind::ClassDef: add(s.kid(3)); break;
    case NodeKind::For: add(s.kid(2)); add(s.kid(3)); break;
    case NodeKind::While:
    case NodeKind::If: add(s.kid(1)); add(s.kid(2)); break;
    case NodeKind::With: add(s.kid(1)); break;
    case NodeKind::Try:
    case NodeKind::TryStar:
      add(s.kid(0));
      for (const auto& h : s.kid(1)->kids) add(h->kid(1));
      add(s.kid(2));
      add(s.kid(3));
      break;
    case NodeKind::Match:
      for (const auto& c : s.kid(1)->kids) add(c->kid(2));
      break;
    default: break;
  }
  return out;
}

}  // namespace cellrw::syntax
