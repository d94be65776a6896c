#include "cellrw/rules/pattern.hpp"

#include <set>
#include <variant>

#include "cellrw/syntax/parser.hpp"

namespace cellrw::rules {

using namespace syntax;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_top_level(std::string_view spec) {
  std::vector<std::string_view> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    char c = spec[i];
    if (c == '(' || c == '[' || c == '{') ++depth;
    if (c == ')' || c == ']' || c == '}') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(trim(spec.substr(start, i - start)));
      start = i + 1;
    }
  }
  auto last = trim(spec.substr(start));
  if (!last.empty()) parts.push_back(last);
  return parts;
}

void collect_holes(const Node& root, std::vector<HoleSpec>& out) {
  walk(root, [&](const Node& n) {
    if (n.hole) out.push_back(*n.hole);
  });
}

}  // namespace

Signature make_signature(std::string_view spec) {
  Signature sig;
  bool keyword_only = false;
  for (auto part : split_top_level(spec)) {
    if (part == "*") {
      keyword_only = true;
      continue;
    }
    Param p;
    p.positional = !keyword_only;
    auto eq = part.find('=');
    p.name = std::string(trim(part.substr(0, eq)));
    if (eq != std::string_view::npos) {
      auto parsed = parse_expression(trim(part.substr(eq + 1)));
      if (auto* f = std::get_if<ParseFailure>(&parsed)) throw RuleError("bad default in signature: " + f->message, p.name);
      p.default_value = std::move(std::get<NodePtr>(parsed));
    }
    sig.params.push_back(std::move(p));
  }
  return sig;
}

std::optional<std::vector<const Node*>> normalize_call(const Node& call, const Signature& sig) {
  if (call.kind != NodeKind::Call) return std::nullopt;
  std::vector<const Node*> out(sig.params.size(), nullptr);
  const Node* args = call.kid(1);
  const Node* kws = call.kid(2);
  std::size_t pos = 0;
  for (const auto& a : args->kids) {
    if (a->kind == NodeKind::Starred) return std::nullopt;
    if (pos >= sig.params.size() || !sig.params[pos].positional) return std::nullopt;
    out[pos++] = a.get();
  }
  for (const auto& k : kws->kids) {
    if (k->text.empty()) return std::nullopt;
    std::size_t i = 0;
    while (i < sig.params.size() && sig.params[i].name != k->text) ++i;
    if (i == sig.params.size() || out[i]) return std::nullopt;
    out[i] = k->kid(0);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i]) continue;
    if (!sig.params[i].default_value) return std::nullopt;
    out[i] = sig.params[i].default_value.get();
  }
  return out;
}

std::string_view callee_name(const Node& call) {
  if (call.kind != NodeKind::Call) return {};
  const Node* f = call.kid(0);
  if (f->kind == NodeKind::Attribute || f->kind == NodeKind::Name) return f->text;
  return {};
}

const Node* PatternTemplate::root_expr() const {
  if (level != PatternLevel::Expression || stmts.empty()) return nullptr;
  return stmts.front()->kid(0);
}

std::vector<HoleSpec> PatternTemplate::binders() const {
  std::vector<HoleSpec> all;
  for (const auto& s : stmts) collect_holes(*s, all);
  std::vector<HoleSpec> out;
  for (auto& h : all)
    if (!h.binder.empty() && !h.reference && !h.fresh) out.push_back(std::move(h));
  return out;
}

PatternTemplate compile_pattern(std::string_view text, PatternLevel level) {
  auto parsed = parse_template(text);
  if (auto* f = std::get_if<ParseFailure>(&parsed))
    throw RuleError("template syntax error at " + std::to_string(f->line) + ":" + std::to_string(f->col) + ": " + f->message, "");
  auto& mod = std::get<Module>(parsed);
  PatternTemplate p;
  p.level = level;
  p.stmts = std::move(mod.root->kids);
  if (p.stmts.empty()) throw RuleError("empty template", "");
  if (level == PatternLevel::Expression && (p.stmts.size() != 1 || p.stmts[0]->kind != NodeKind::Expr))
    throw RuleError("expression template must be a single expression", "");
  std::vector<HoleSpec> holes;
  for (const auto& s : p.stmts) collect_holes(*s, holes);
  std::set<std::string> seen;
  for (const auto& h : holes) {
    if (h.fresh) throw RuleError("fresh-name hole in a left-hand side", h.binder);
    if (!h.reference && !h.binder.empty() && !seen.insert(h.binder).second)
      throw RuleError("duplicate binder", h.binder);
  }
  return p;
}

std::optional<Anchor> anchor_of(const PatternTemplate& p, const SignatureTable& sigs) {
  const Node* key = nullptr;
  if (p.level == PatternLevel::Expression) {
    key = p.root_expr();
  } else if (!p.stmts.empty()) {
    const Node& s = *p.stmts.front();
    if (s.kind == NodeKind::Assign) key = s.kid(1);
    else if (s.kind == NodeKind::Expr || s.kind == NodeKind::Return) key = s.kid(0);
  }
  if (!key || key->kind != NodeKind::Call) return std::nullopt;
  auto name = callee_name(*key);
  if (name.empty()) return std::nullopt;
  Anchor a;
  a.callee = std::string(name);
  const Node* first = nullptr;
  auto sig = sigs.find(name);
  if (sig != sigs.end()) {
    if (sig->second.params.empty() || sig->second.params[0].default_value) return a;
    a.arg0_keyword = sig->second.params[0].name;
    auto norm = normalize_call(*key, sig->second);
    if (norm) first = (*norm)[0];
  } else if (!key->kid(1)->kids.empty()) {
    first = key->kid(1)->kid(0);
  }
  if (!first) return a;
  if (first->kind != NodeKind::Hole) {
    a.arg0 = first->kind;
    return a;
  }
  switch (first->hole->kind) {
    case HoleKind::Name:
    case HoleKind::FuncName: a.arg0 = NodeKind::Name; break;
    case HoleKind::Lambda: a.arg0 = NodeKind::Lambda; break;
    case HoleKind::ConstantInt:
    case HoleKind::ConstantStr: a.arg0 = NodeKind::Constant; break;
    case HoleKind::Expr: break;
  }
  if (first->hole->reference) a.arg0.reset();
  return a;
}

}  // namespace cellrw::rules
