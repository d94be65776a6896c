#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cellrw::syntax {

// Byte offsets into the originating source. Synthesized nodes carry an
// invalid span.
struct Span {
  static constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t begin = kNone;
  std::uint32_t end = kNone;

  bool valid() const { return begin != kNone; }
  bool contains(const Span& other) const {
    return valid() && other.valid() && begin <= other.begin && other.end <= end;
  }
};

enum class NodeKind : std::uint8_t {
  Module,
  // statements
  FunctionDef,
  ClassDef,
  Return,
  Delete,
  Assign,
  AugAssign,
  AnnAssign,
  For,
  While,
  If,
  With,
  Match,
  Raise,
  Try,
  TryStar,
  Assert,
  Import,
  ImportFrom,
  Global,
  Nonlocal,
  Expr,
  Pass,
  Break,
  Continue,
  TypeAlias,
  // expressions
  BoolOp,
  NamedExpr,
  BinOp,
  UnaryOp,
  Lambda,
  IfExp,
  Dict,
  Set,
  ListComp,
  SetComp,
  DictComp,
  GeneratorExp,
  Await,
  Yield,
  YieldFrom,
  Compare,
  Call,
  JoinedStr,
  Constant,
  Attribute,
  Subscript,
  Starred,
  Name,
  List,
  Tuple,
  Slice,
  // auxiliary
  Seq,
  Arguments,
  Arg,
  Keyword,
  Alias,
  WithItem,
  ExceptHandler,
  Comprehension,
  MatchCase,
  MatchValue,
  MatchSingleton,
  MatchSequence,
  MatchMapping,
  MatchClass,
  MatchStar,
  MatchAs,
  MatchOr,
  TypeVar,
  ParamSpec,
  TypeVarTuple,
  // template only
  Hole,
};

std::string_view kind_name(NodeKind k);
bool is_statement(NodeKind k);
bool is_expression(NodeKind k);

// Literal type tag of a Constant.
enum class ConstKind : std::uint8_t { None, True, False, Ellipsis, Int, Float, Complex, Str, Bytes };

enum class HoleKind : std::uint8_t { Expr, Name, ConstantInt, ConstantStr, Lambda, FuncName };

std::string_view hole_kind_name(HoleKind k);

struct HoleSpec {
  HoleKind kind = HoleKind::Expr;
  std::string binder;
  bool fresh = false;      // @{$name}: a generated temporary
  bool reference = false;  // @{name} with no kind: refers to an LHS binder

  bool operator==(const HoleSpec&) const = default;
};

struct Node;
using NodePtr = std::unique_ptr<Node>;

// One node of the tree. Children live in `kids` with a fixed layout per
// kind; optional children are null. List-valued fields use Seq nodes.
//
//   FunctionDef  text=name flag=async  [Seq decorators, Arguments, returns?, Seq body, Seq type_params]
//   ClassDef     text=name  [Seq decorators, Seq bases, Seq keywords, Seq body, Seq type_params]
//   Return       [value?]            Delete     [targets...]
//   Assign       [Seq targets, value]
//   AugAssign    text=op  [target, value]
//   AnnAssign    flag=simple  [target, annotation, value?]
//   For          flag=async  [target, iter, Seq body, Seq orelse]
//   While, If    [test, Seq body, Seq orelse]
//   With         flag=async  [Seq items, Seq body]
//   Match        [subject, Seq cases]
//   Raise        [exc?, cause?]
//   Try, TryStar [Seq body, Seq handlers, Seq orelse, Seq finalbody]
//   Assert       [test, msg?]
//   Import       [aliases...]        ImportFrom text=module level  [aliases...]
//   Global, Nonlocal  names in ops
//   Expr         [value]
//   TypeAlias    [name, Seq type_params, value]
//   BoolOp       text=and|or  [values...]
//   NamedExpr    [target, value]     BinOp text=op [left, right]
//   UnaryOp      text=not|-|+|~  [operand]
//   Lambda       [Arguments, body]   IfExp [test, body, orelse]
//   Dict         [Seq keys (null entry for **), Seq values]
//   Set, List, Tuple  [elts...]
//   ListComp, SetComp, GeneratorExp  [elt, Comprehension...]
//   DictComp     [key, value, Comprehension...]
//   Await, YieldFrom  [value]        Yield [value?]
//   Compare      ops  [left, comparators...]
//   Call         [func, Seq args, Seq keywords]
//   JoinedStr    ops = raw literal pieces (kept opaque)
//   Constant     constant=tag text=canonical value text2=raw literal when opaque
//   Attribute    text=attr [value]   Subscript [value, slice]
//   Starred      [value]             Name text=id
//   Slice        [lower?, upper?, step?]
//   Arguments    [Seq posonly, Seq args, vararg?, Seq kwonly, Seq kw_defaults, kwarg?, Seq defaults]
//   Arg          text=name [annotation?]
//   Keyword      text=arg ("" for **) [value]
//   Alias        text=name text2=asname
//   WithItem     [context_expr, optional_vars?]
//   ExceptHandler text=name [type?, Seq body]
//   Comprehension flag=async [target, iter, ifs...]
//   MatchCase    [pattern, guard?, Seq body]
//   MatchValue   [value]             MatchSingleton constant
//   MatchSequence, MatchOr  [patterns...]
//   MatchMapping text=rest flag=has_rest [Seq keys, Seq patterns]
//   MatchClass   ops=kwd_attrs [cls, Seq patterns, Seq kwd_patterns]
//   MatchStar    text=name flag=has_name
//   MatchAs      text=name flag=has_name [pattern?]
//   TypeVar      text=name [bound?, default?]
//   ParamSpec, TypeVarTuple text=name [default?]
struct Node {
  NodeKind kind;
  Span span;
  std::string text;
  std::string text2;
  ConstKind constant = ConstKind::None;
  bool flag = false;
  int level = 0;
  std::vector<std::string> ops;
  std::vector<NodePtr> kids;
  std::optional<HoleSpec> hole;

  explicit Node(NodeKind k) : kind(k) {}

  Node* kid(std::size_t i) const { return i < kids.size() ? kids[i].get() : nullptr; }
};

NodePtr make_node(NodeKind k, Span span = {});
NodePtr make_name(std::string id);
NodePtr make_seq(std::vector<NodePtr> items = {});
NodePtr make_str(std::string value);
NodePtr make_int(long long value);

// Deep copy. Spans are kept unless `drop_spans`.
NodePtr clone(const Node& n, bool drop_spans = false);

// Pre-order visit of every non-null node.
void walk(const Node& n, const std::function<void(const Node&)>& fn);
// Pre-order visit; return false from `fn` to skip a subtree.
void walk_pruned(const Node& n, const std::function<bool(const Node&)>& fn);

// Statement lists owned by a compound statement (body, orelse, handler
// bodies, case bodies). Class bodies are included.
std::vector<const Node*> nested_bodies(const Node& stmt);

struct Module {
  std::string source;
  NodePtr root;  // NodeKind::Module, kids = statements

  const std::vector<NodePtr>& body() const { return root->kids; }
};

}  // namespace cellrw::syntax
