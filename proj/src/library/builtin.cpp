#include "cellrw/library/builtin.hpp"

#include <variant>

#include "cellrw/syntax/parser.hpp"
#include "cellrw/syntax/unparse.hpp"
#include "cellrw/transform/classify.hpp"

namespace cellrw::library {

using namespace rules;
using namespace syntax;
using transform::FunctionClassification;

namespace {

using Kind = FunctionClassification::Kind;
using SP = SyntacticPrecondition;

RuleForm expression_form(std::string label, std::string_view lhs) {
  RuleForm f;
  f.label = std::move(label);
  f.lhs = compile_pattern(lhs, PatternLevel::Expression);
  return f;
}

RuleForm statement_form(std::string label, std::string_view lhs) {
  RuleForm f;
  f.label = std::move(label);
  f.lhs = compile_pattern(lhs, PatternLevel::Statement);
  return f;
}

void add_guards(RuleForm& f, std::initializer_list<std::string_view> guards) {
  for (auto g : guards) f.rprecs.push_back(runtime_precondition(g));
}

std::string literal(const Node& n) { return unparse_expr(n); }

// pandas treats a multi-character pattern as a regular expression.
SP literal_delimiter(const std::string& binder) {
  return SP::make_custom("literal delimiter " + binder, {binder}, [binder](const Bindings& b) {
    const Node* d = b.get(binder);
    if (!d || d->text.empty()) return false;
    if (d->text.size() == 1) return true;
    return d->text.find_first_of(".^$*+?{}[]\\|()") == std::string::npos;
  });
}

RewriteRule nsmallest() {
  RewriteRule r;
  r.id = "nsmallest";
  r.kind = RuleKind::Guarded;
  r.summary = "sort_values().head(n) on a series becomes nsmallest(n)";
  auto f = expression_form("sort-head", "@{expr: called_on}.sort_values().head(n=@{Constant(int): first_n})");
  f.signatures.emplace("head", make_signature("n=5"));
  add_guards(f, {
                    "isinstance(@{called_on}, @{$pd}.Series)",
                    "@{called_on}.dtype.kind in 'iuf'",
                    "not @{called_on}.hasnans",
                    "@{called_on}.is_unique",
                });
  f.rhs = static_rhs("@{called_on}.nsmallest(n=@{first_n})");
  r.forms.push_back(std::move(f));
  return r;
}

RewriteRule concat_lists() {
  RewriteRule r;
  r.id = "concat-lists";
  r.kind = RuleKind::Guarded;
  r.summary = "Series(x.tolist() + y.tolist()) becomes concat([x, y], ignore_index=True)";
  auto common = [](RuleForm& f) {
    add_guards(f, {
                      "isinstance(@{x}, @{$pd}.Series) and isinstance(@{y}, @{$pd}.Series)",
                      "@{x}.dtype == @{y}.dtype",
                      "@{x}.dtype.name in ('int64', 'float64', 'bool')",
                      "@{x}.size + @{y}.size > 0",
                      "(@{x}.name is None or @{x}.name != @{y}.name)",
                  });
    f.rhs = static_rhs("@{$pd}.concat([@{x}, @{y}], ignore_index=True)");
  };
  auto qualified = expression_form("qualified", "@{Name: pdmod}.Series(@{expr: x}.tolist() + @{expr: y}.tolist())");
  add_guards(qualified, {"@{pdmod}.Series is @{$pd}.Series"});
  common(qualified);
  auto bare = expression_form("bare", "Series(@{expr: x}.tolist() + @{expr: y}.tolist())");
  add_guards(bare, {"Series is @{$pd}.Series"});
  common(bare);
  r.forms.push_back(std::move(qualified));
  r.forms.push_back(std::move(bare));
  return r;
}

constexpr std::string_view kSplitGuards[] = {
    "isinstance(@{ser}, @{$pd}.Series)",
    "@{ser}.dtype == object",
    "@{$pd}.api.types.infer_dtype(@{ser}, skipna=False) == 'string'",
    // Without any delimiter the expanded frame has one column and the original raises.
    "@{ser}.str.contains(@{d}, regex=False).any()",
};

RewriteRule str_split_loop() {
  RewriteRule r;
  r.id = "str-split-loop";
  r.kind = RuleKind::Guarded;
  r.summary = "str.split(d, 1, expand=True) into two targets becomes a pure Python loop";
  SignatureTable sigs;
  sigs.emplace("split", make_signature("pat=None, n=-1, *, expand=False, regex=None"));

  auto unpack = statement_form(
      "tuple-targets",
      "@{Name: a}, @{Name: b} = @{expr: ser}.str.split(@{Constant(str): d}, @{Constant(int): k}, expand=True)");
  unpack.signatures = sigs;
  unpack.sprecs = {SP::int_equals("k", 1), SP::fragments_differ("a", "b"), literal_delimiter("d")};
  for (auto g : kSplitGuards) unpack.rprecs.push_back(runtime_precondition(g));
  unpack.rhs = static_rhs(
      "@{a}, @{b}, @{$ls} = [], [], @{ser}.tolist()\n"
      "for @{$it} in @{$ls}:\n"
      "    @{$spl} = @{$it}.split(@{d}, 1)\n"
      "    @{a}.append(@{$spl}[0])\n"
      "    @{b}.append(@{$spl}[1] if len(@{$spl}) > 1 else None)\n"
      "@{a} = @{$pd}.Series(@{a}, @{ser}.index)\n"
      "@{b} = @{$pd}.Series(@{b}, @{ser}.index)\n");

  auto columns = statement_form("column-targets",
                                "@{Name: df}[[@{Constant(str): c1}, @{Constant(str): c2}]] = "
                                "@{expr: ser}.str.split(@{Constant(str): d}, @{Constant(int): k}, expand=True)");
  columns.signatures = sigs;
  columns.sprecs = {SP::int_equals("k", 1), SP::fragments_differ("c1", "c2"), literal_delimiter("d")};
  columns.rprecs.push_back(runtime_precondition("isinstance(@{df}, @{$pd}.DataFrame)"));
  for (auto g : kSplitGuards) columns.rprecs.push_back(runtime_precondition(g));
  columns.rhs = static_rhs(
      "@{$a} = []\n"
      "@{$b} = []\n"
      "@{$ls} = @{ser}.tolist()\n"
      "for @{$it} in @{$ls}:\n"
      "    @{$spl} = @{$it}.split(@{d}, 1)\n"
      "    @{$a}.append(@{$spl}[0])\n"
      "    @{$b}.append(@{$spl}[1] if len(@{$spl}) > 1 else None)\n"
      "@{df}[@{c1}] = @{$pd}.Series(@{$a}, @{ser}.index)\n"
      "@{df}[@{c2}] = @{$pd}.Series(@{$b}, @{ser}.index)\n");

  r.forms.push_back(std::move(unpack));
  r.forms.push_back(std::move(columns));
  return r;
}

constexpr std::string_view kApplyLhs = "@{expr: df}.apply(@{Name: fun}, axis=1)";
constexpr std::string_view kFrameApply = "func, axis=0, raw=False, result_type=None, args=()";

struct Resolved {
  const Node* def = nullptr;
  std::string row;
};

std::optional<Resolved> resolve(const Bindings& b, const MatchContext& ctx, std::size_t top) {
  const Node* fun = b.get("fun");
  if (!fun || !ctx.resolve_function) return std::nullopt;
  const Node* def = ctx.resolve_function(fun->text, top);
  if (!def || def->kind != NodeKind::FunctionDef) return std::nullopt;
  const Node* args = def->kid(1);
  const Node* first = !args->kid(0)->kids.empty() ? args->kid(0)->kid(0) : args->kid(1)->kid(0);
  if (!first) return std::nullopt;
  return Resolved{def, first->text};
}

std::string column_list(const std::set<std::string>& cols) {
  std::string s = "[";
  for (const auto& c : cols) {
    if (s.size() > 1) s += ", ";
    s += repr_str(c);
  }
  return s + "]";
}

void frame_guards(Synthesis& s) {
  for (auto g : {"isinstance(@{df}, @{$pd}.DataFrame)", "@{df}.shape[0] > 0", "@{df}.columns.is_unique"})
    s.guards.push_back(runtime_precondition(g));
}

RuleForm apply_form() {
  auto f = expression_form("apply-axis1", kApplyLhs);
  f.signatures.emplace("apply", make_signature(kFrameApply));
  return f;
}

RewriteRule apply_direct() {
  RewriteRule r;
  r.id = "apply-direct";
  r.kind = RuleKind::Deferred;
  r.summary = "apply(fun, axis=1) over column arithmetic becomes fun(df)";
  auto f = apply_form();
  f.rhs.synthesize = [](const Bindings& b, const MatchContext& ctx, std::size_t top) -> std::optional<Synthesis> {
    auto res = resolve(b, ctx, top);
    if (!res) return std::nullopt;
    auto c = transform::classify_apply_target(*res->def, res->row);
    if (c.kind != Kind::ColumnMathOnly) return std::nullopt;
    Synthesis s;
    s.classification = std::string(transform::classification_name(c.kind));
    frame_guards(s);
    // Row-wise evaluation upcasts mixed numeric frames; only shapes where the
    // referenced columns keep their dtype are allowed.
    auto cols = column_list(c.columns);
    s.guards.push_back(runtime_precondition("@{df}.dtypes[" + cols + "].astype(str).isin(['int64', 'float64']).all()"));
    s.guards.push_back(runtime_precondition("(@{df}.dtypes.nunique() == 1 or (@{df}.dtypes[" + cols +
                                            "].astype(str) == 'float64').all())"));
    // A non-numeric column makes rows hold Python scalars, which raise on float
    // power overflow where numpy does not. Zero divisors differ either way:
    // Python raises, numpy integers give 0, series arithmetic gives inf or nan.
    auto frame = make_node(NodeKind::Hole);
    frame->hole = HoleSpec{HoleKind::Expr, "df", false, true};
    frame->text = "df";
    auto hazards = transform::arithmetic_hazards(*res->def, res->row, *frame, "@{fun}");
    if (!hazards) return std::nullopt;
    // Series arithmetic keeps a name only while every operand shares it; apply
    // always returns an unnamed series.
    s.rhs = static_rhs(hazards->columns.size() >= 2 ? "@{fun}(@{df})" : "@{fun}(@{df}).rename(None)").stmts;
    std::string numpy_rows =
        "all(isinstance(@{$dt}, @{$np}.dtype) and @{$dt}.kind in 'iuf' for @{$dt} in @{df}.dtypes)";
    if (hazards->power) s.guards.push_back(runtime_precondition(numpy_rows));
    // Divisors may read parameter defaults, so they run after the integrity check.
    for (const auto& d : hazards->divisors)
      s.trusted_guards.push_back(runtime_precondition("@{$np}.all((" + syntax::unparse_expr(*d) + ") != 0)"));
    s.integrity_fun = b.get("fun")->text;
    s.analyzed_def = res->def;
    return s;
  };
  r.forms.push_back(std::move(f));
  return r;
}

RewriteRule apply_select() {
  RewriteRule r;
  r.id = "apply-select";
  r.kind = RuleKind::Deferred;
  r.summary = "apply(fun, axis=1) over an if/elif/else chain becomes a vectorized select";
  auto f = apply_form();
  f.rhs.synthesize = [](const Bindings& b, const MatchContext& ctx, std::size_t top) -> std::optional<Synthesis> {
    auto res = resolve(b, ctx, top);
    if (!res) return std::nullopt;
    auto c = transform::classify_apply_target(*res->def, res->row);
    if (c.kind != Kind::IfElseVectorizable) return std::nullopt;

    auto frame = make_node(NodeKind::Hole);
    frame->hole = HoleSpec{HoleKind::Expr, "df", false, true};
    frame->text = "df";
    transform::VectorizeNeeds needs;
    std::vector<NodePtr> conds;
    for (const auto& br : c.branches) {
      auto v = transform::vectorize_condition(*br.condition, res->row, *frame, &needs);
      if (!v) return std::nullopt;
      conds.push_back(std::move(*v));
    }

    Synthesis s;
    s.classification = std::string(transform::classification_name(c.kind));
    s.rhs = static_rhs("@{$conditions} = []\n@{$choices} = []\n@{$pd}.Series(@{$np}.select(@{$conditions}, @{$choices}, default=" +
                       literal(*c.default_value) + "), index=@{df}.index)\n")
                .stmts;
    for (auto& cond : conds) s.rhs[0]->kid(1)->kids.push_back(std::move(cond));
    for (const auto& br : c.branches) s.rhs[1]->kid(1)->kids.push_back(clone(*br.value, true));

    frame_guards(s);
    for (const auto& col : needs.str_columns) {
      auto sel = "@{df}[" + repr_str(col) + "]";
      s.guards.push_back(runtime_precondition(sel + ".dtype == object"));
      s.guards.push_back(runtime_precondition("@{$pd}.api.types.infer_dtype(" + sel + ", skipna=False) == 'string'"));
    }
    for (const auto& name : needs.containers)
      s.guards.push_back(runtime_precondition("isinstance(" + name + ", (list, tuple, set, frozenset))"));
    s.integrity_fun = b.get("fun")->text;
    s.analyzed_def = res->def;
    return s;
  };
  r.forms.push_back(std::move(f));
  return r;
}

RewriteRule substr_contains() {
  RewriteRule r;
  r.id = "substr-contains";
  r.kind = RuleKind::Guarded;
  r.summary = "apply(lambda x: 's' in x) becomes str.contains('s', regex=False)";
  auto f = expression_form("lambda-in", "@{expr: ser}.apply(lambda @{Name: p}: @{Constant(str): needle} in @{Name: q})");
  f.signatures.emplace("apply", make_signature("func"));
  f.sprecs = {SP::fragments_equal("p", "q")};
  add_guards(f, {
                    "isinstance(@{ser}, @{$pd}.Series)",
                    "@{ser}.dtype == object",
                    "@{$pd}.api.types.infer_dtype(@{ser}, skipna=False) == 'string'",
                });
  f.rhs = static_rhs("@{ser}.str.contains(@{needle}, regex=False)");
  r.forms.push_back(std::move(f));
  return r;
}

}  // namespace

Registry builtin_rules() {
  std::vector<RewriteRule> rules;
  rules.push_back(nsmallest());
  rules.push_back(concat_lists());
  rules.push_back(str_split_loop());
  rules.push_back(apply_direct());
  rules.push_back(apply_select());
  rules.push_back(substr_contains());
  return Registry(std::move(rules));
}

}  // namespace cellrw::library
