#include "cellrw/driver/driver.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include <json.hpp>

#include "cellrw/rules/matcher.hpp"
#include "cellrw/syntax/names.hpp"
#include "cellrw/syntax/unparse.hpp"
#include "cellrw/transform/emit.hpp"

namespace cellrw::driver {

using syntax::NodeKind;
using syntax::NodePtr;

namespace {

constexpr std::string_view kChunkMarker = "# %%";

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

// Identifiers carrying the reserved prefix; no fresh name may collide with them.
void reserved_identifiers(std::string_view text, std::set<std::string>& out) {
  for (auto at = text.find(syntax::kReservedPrefix); at != std::string_view::npos;
       at = text.find(syntax::kReservedPrefix, at + 1)) {
    auto end = at;
    while (end < text.size() && is_ident_char(text[end])) ++end;
    out.emplace(text.substr(at, end - at));
  }
}

// Line-oriented IPython syntax ("%magic", "!cmd") blanked so that the rest of
// a history chunk can still be analyzed.
std::string blank_magics(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    auto line = text.substr(pos, end - pos);
    auto first = line.find_first_not_of(" \t");
    if (first != std::string_view::npos && (line[first] == '%' || line[first] == '!')) {
      if (nl != std::string_view::npos) out += '\n';
    } else {
      out += line;
    }
    pos = end;
  }
  return out;
}

bool star_import(const Node& stmt) {
  if (stmt.kind != NodeKind::ImportFrom) return false;
  for (const auto& k : stmt.kids)
    if (k && k->kind == NodeKind::Alias && k->text == "*") return true;
  return false;
}

using Clock = std::chrono::steady_clock;

std::int64_t micros(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration_cast<std::chrono::microseconds>(b - a).count();
}

}  // namespace

Lookup find_top_level_function(const std::vector<NodePtr>& stmts, std::size_t end, std::string_view name,
                               const Node** out) {
  for (std::size_t i = std::min(end, stmts.size()); i-- > 0;) {
    const Node& s = *stmts[i];
    if (s.kind == NodeKind::FunctionDef && s.text == name) {
      *out = &s;
      return Lookup::Found;
    }
    if (star_import(s) || transform::assigned_names({&s}).count(std::string(name))) return Lookup::Shadowed;
  }
  return Lookup::Unbound;
}

History History::from_text(std::string_view text) {
  History h;
  std::string current;
  std::size_t pos = 0;
  bool any = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    auto line = text.substr(pos, end - pos);
    if (line.substr(0, kChunkMarker.size()) == kChunkMarker) {
      if (any || !current.empty()) h.append(std::move(current));
      current.clear();
      any = true;
    } else {
      current += line;
    }
    pos = end;
  }
  if (!current.empty()) h.append(std::move(current));
  return h;
}

void History::append(std::string cell_source) {
  auto c = std::make_unique<Chunk>();
  c->text = std::move(cell_source);
  chunks_.push_back(std::move(c));
}

std::string History::text() const {
  std::string out;
  for (const auto& c : chunks_) {
    out += kChunkMarker;
    out += '\n';
    out += c->text;
    if (!c->text.empty() && c->text.back() != '\n') out += '\n';
  }
  return out;
}

const syntax::Module* History::module(const Chunk& c) const {
  if (!c.parsed) {
    c.parsed = true;
    auto r = syntax::parse_module(c.text);
    if (!syntax::ok(r)) r = syntax::parse_module(blank_magics(c.text));
    if (syntax::ok(r)) c.module = std::move(std::get<syntax::Module>(r));
  }
  return c.module ? &*c.module : nullptr;
}

namespace {

// Cheap text filter: a chunk can only bind `name` by mentioning it or through a star import.
bool may_bind(std::string_view text, std::string_view name) {
  return text.find(name) != std::string_view::npos || text.find('*') != std::string_view::npos;
}

}  // namespace

const Node* History::find_function(std::string_view name) const {
  for (std::size_t i = chunks_.size(); i-- > 0;) {
    const Chunk& c = *chunks_[i];
    if (!may_bind(c.text, name)) continue;
    const syntax::Module* m = module(c);
    if (!m) continue;
    const Node* def = nullptr;
    switch (find_top_level_function(m->body(), m->body().size(), name, &def)) {
      case Lookup::Found: return def;
      case Lookup::Shadowed: return nullptr;
      case Lookup::Unbound: break;
    }
  }
  return nullptr;
}

bool History::binds(std::string_view name) const {
  for (const auto& c : chunks_) {
    if (!may_bind(c->text, name)) continue;
    const syntax::Module* m = module(*c);
    if (!m) continue;
    const Node* def = nullptr;
    if (find_top_level_function(m->body(), m->body().size(), name, &def) != Lookup::Unbound) return true;
  }
  return false;
}

std::string_view outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Rewritten: return "rewritten";
    case Outcome::PassThrough: return "pass-through";
    case Outcome::ParseFailure: return "parse-failure";
  }
  return "pass-through";
}

std::string report_json(const CellReport& r, bool with_timings) {
  nlohmann::ordered_json j;
  j["cell_id"] = r.cell_id;
  j["outcome"] = outcome_name(r.outcome);
  j["matches"] = nlohmann::ordered_json::array();
  for (const auto& m : r.matches) {
    nlohmann::ordered_json e;
    e["rule"] = m.rule;
    e["span"] = {m.first_line, m.last_line};
    j["matches"].push_back(std::move(e));
  }
  if (with_timings)
    j["timings_us"] = {{"parse", r.timings.parse_us},
                       {"match", r.timings.match_us},
                       {"codegen", r.timings.codegen_us},
                       {"total", r.timings.total_us}};
  j["bytes_in"] = r.bytes_in;
  j["bytes_out"] = r.bytes_out;
  j["skipped"] = r.skipped;
  return j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

CellResult rewrite_cell(std::string_view text, const History& history, const rules::Registry& registry) {
  syntax::SourceText src;
  src.text = std::string(text);
  return rewrite_cell(src, history, registry);
}

CellResult rewrite_cell(const syntax::SourceText& src, const History& history, const rules::Registry& registry) {
  auto t0 = Clock::now();
  CellResult out;
  CellReport& rep = out.report;
  rep.cell_id = src.origin.id.empty() ? "cell" : src.origin.id;
  rep.bytes_in = src.text.size();
  out.text = src.text;

  auto finish = [&](Outcome o) {
    rep.outcome = o;
    rep.bytes_out = out.text.size();
    rep.timings.total_us = micros(t0, Clock::now());
    return std::move(out);
  };

  auto parsed = syntax::parse_module(src);
  auto t1 = Clock::now();
  rep.timings.parse_us = micros(t0, t1);
  if (!syntax::ok(parsed)) {
    const auto& f = std::get<syntax::ParseFailure>(parsed);
    rep.skipped.push_back("parse failure at line " + std::to_string(f.line) + ": " + f.message);
    return finish(Outcome::ParseFailure);
  }
  const syntax::Module& module = std::get<syntax::Module>(parsed);

  std::vector<const Node*> stmts;
  for (const auto& s : module.body()) stmts.push_back(s.get());

  rules::MatchContext ctx;
  ctx.source = src.text;
  ctx.resolve_function = [&](std::string_view name, std::size_t top) -> const Node* {
    const Node* def = nullptr;
    switch (find_top_level_function(module.body(), top, name, &def)) {
      case Lookup::Found: return def;
      case Lookup::Shadowed: return nullptr;
      case Lookup::Unbound: break;
    }
    // A later top-level rebinding in this cell does not matter here; the
    // integrity guard covers what actually runs.
    return history.find_function(name);
  };

  auto matches = rules::scan_cell(stmts, registry, ctx);
  auto t2 = Clock::now();
  rep.timings.match_us = micros(t1, t2);
  if (matches.empty()) {
    rep.timings.codegen_us = 0;
    return finish(Outcome::PassThrough);
  }

  std::set<std::string> forbidden;
  reserved_identifiers(src.text, forbidden);
  for (std::size_t i = 0; i < history.size(); ++i) reserved_identifiers(history.chunk(i), forbidden);
  syntax::FreshNamePool pool(std::move(forbidden));

  std::string_view newline = src.text.find("\r\n") != std::string::npos ? "\r\n" : "\n";
  syntax::LineIndex lines(src.text);

  struct Splice {
    std::uint32_t begin, end;
    std::string text;
  };
  std::vector<Splice> splices;
  for (const auto& m : matches) {
    const auto& rule = registry[m.rule_index];
    bool last = !module.body().empty() && m.bindings.window.back() == module.body().back().get();
    auto plan = transform::emit_guarded(rule, m.bindings, m.bindings.window, pool, last);
    transform::check_plan_invariants(plan);

    auto begin = plan.original.front()->span.begin;
    auto end = plan.original.back()->span.end;
    auto line_start = lines.line_start(lines.locate(begin).line);
    std::string indent = src.text.substr(line_start, begin - line_start);
    std::vector<const Node*> repl;
    for (const auto& s : plan.replacement) repl.push_back(s.get());
    splices.push_back({begin, end, syntax::unparse_statements(repl, indent, newline)});

    MatchRecord rec;
    rec.rule = plan.rule_id;
    rec.first_line = lines.locate(begin).line;
    rec.last_line = lines.locate(end > begin ? end - 1 : begin).line;
    rec.guard_summary = plan.guard_summary;
    rep.matches.push_back(std::move(rec));
  }

  std::sort(splices.begin(), splices.end(), [](const Splice& a, const Splice& b) { return a.begin < b.begin; });
  std::string result;
  std::uint32_t pos = 0;
  for (const auto& s : splices) {
    result.append(src.text, pos, s.begin - pos);
    result += s.text;
    pos = s.end;
  }
  result.append(src.text, pos);
  out.text = std::move(result);
  rep.timings.codegen_us = micros(t2, Clock::now());
  return finish(Outcome::Rewritten);
}

// Notebook documents

namespace {

struct CellSlot {
  std::size_t index = 0;
  std::string cell_type;
  std::string id;
  std::size_t source_begin = 0, source_end = 0;
  bool has_source = false;
};

// Walks raw JSON text to find the byte ranges of each cell's `source` value,
// so untouched bytes can be copied verbatim.
class RawScanner {
 public:
  explicit RawScanner(std::string_view s) : s_(s) {}

  std::vector<CellSlot> cells() {
    std::vector<CellSlot> out;
    ws();
    expect('{');
    bool found = false;
    members([&](const std::string& key) {
      if (key != "cells") return skip_value();
      found = true;
      expect('[');
      elements([&] {
        CellSlot slot;
        slot.index = out.size();
        expect('{');
        members([&](const std::string& k) {
          auto b = i_;
          if (k == "cell_type" || k == "id") {
            auto v = decode(b, skip_value_end());
            if (!v.is_string()) fail("cell field '" + k + "' must be a string");
            (k == "id" ? slot.id : slot.cell_type) = v.get<std::string>();
          } else if (k == "source") {
            slot.source_begin = b;
            slot.source_end = skip_value_end();
            slot.has_source = true;
          } else {
            skip_value();
          }
        });
        out.push_back(std::move(slot));
      });
    });
    ws();
    if (i_ != s_.size()) fail("trailing data after document");
    if (!found) fail("document has no 'cells' array");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw NotebookError("malformed notebook at byte " + std::to_string(i_) + ": " + msg);
  }
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) ++i_;
  }
  void expect(char c) {
    ws();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  bool peek(char c) {
    ws();
    return i_ < s_.size() && s_[i_] == c;
  }
  nlohmann::json decode(std::size_t b, std::size_t e) const {
    try {
      return nlohmann::json::parse(s_.substr(b, e - b));
    } catch (const nlohmann::json::exception& ex) {
      throw NotebookError(std::string("malformed notebook: ") + ex.what());
    }
  }
  std::string key() {
    ws();
    auto b = i_;
    if (!peek('"')) fail("expected string key");
    skip_string();
    return decode(b, i_).get<std::string>();
  }
  void skip_string() {
    ++i_;
    while (i_ < s_.size() && s_[i_] != '"') i_ += s_[i_] == '\\' ? 2 : 1;
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
  }
  template <class F>
  void members(F&& on_member) {
    if (peek('}')) {
      ++i_;
      return;
    }
    for (;;) {
      auto k = key();
      expect(':');
      ws();
      on_member(k);
      if (peek(',')) {
        ++i_;
        continue;
      }
      expect('}');
      return;
    }
  }
  template <class F>
  void elements(F&& on_element) {
    if (peek(']')) {
      ++i_;
      return;
    }
    for (;;) {
      ws();
      on_element();
      if (peek(',')) {
        ++i_;
        continue;
      }
      expect(']');
      return;
    }
  }
  void skip_value() { skip_value_end(); }
  std::size_t skip_value_end() {
    ws();
    if (i_ >= s_.size()) fail("unexpected end of document");
    char c = s_[i_];
    if (c == '"') {
      skip_string();
    } else if (c == '{') {
      ++i_;
      members([&](const std::string&) { skip_value(); });
    } else if (c == '[') {
      ++i_;
      elements([&] { skip_value(); });
    } else {
      auto b = i_;
      while (i_ < s_.size() && std::string_view(",}] \t\r\n").find(s_[i_]) == std::string_view::npos) ++i_;
      if (b == i_) fail("unexpected character");
    }
    return i_;
  }

  std::string_view s_;
  std::size_t i_ = 0;
};

std::vector<std::string> split_keep_newlines(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    out.emplace_back(text.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::string dump_string(const std::string& s) {
  return nlohmann::json(s).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

std::string_view leading_ws_of_line(std::string_view doc, std::size_t at) {
  auto ls = doc.rfind('\n', at == 0 ? 0 : at - 1);
  ls = ls == std::string_view::npos ? 0 : ls + 1;
  auto e = ls;
  while (e < doc.size() && (doc[e] == ' ' || doc[e] == '\t')) ++e;
  return doc.substr(ls, e - ls);
}

// Serializes `text` in the shape of the original `source` value.
std::string serialize_source(std::string_view doc, const CellSlot& slot, const std::string& text) {
  std::string_view orig = doc.substr(slot.source_begin, slot.source_end - slot.source_begin);
  if (orig.empty() || orig.front() != '[') return dump_string(text);
  auto lines = split_keep_newlines(text);
  bool multiline = orig.find('\n') != std::string_view::npos;
  std::string out = "[";
  if (!multiline) {
    for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? ", " : "") + dump_string(lines[i]);
    return out + "]";
  }
  std::string nl = orig.find("\r\n") != std::string_view::npos ? "\r\n" : "\n";
  std::string closing(leading_ws_of_line(doc, slot.source_end - 1));
  std::string item;
  auto first = orig.find_first_not_of(" \t\r\n", 1);
  if (first != std::string_view::npos && orig[first] != ']')
    item = std::string(leading_ws_of_line(doc, slot.source_begin + first));
  else
    item = closing + " ";
  if (lines.empty()) return out + nl + closing + "]";
  for (std::size_t i = 0; i < lines.size(); ++i) out += nl + item + dump_string(lines[i]) + (i + 1 < lines.size() ? "," : "");
  return out + nl + closing + "]";
}

std::string source_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (!v.is_array()) throw NotebookError("malformed notebook: cell source must be a string or a list of strings");
  std::string s;
  for (const auto& part : v) {
    if (!part.is_string()) throw NotebookError("malformed notebook: cell source must be a string or a list of strings");
    s += part.get<std::string>();
  }
  return s;
}

}  // namespace

NotebookResult rewrite_notebook(std::string_view document, History history, const rules::Registry& registry) {
  RawScanner scanner(document);
  auto cells = scanner.cells();

  NotebookResult result;
  struct Edit {
    std::size_t begin, end;
    std::string text;
  };
  std::vector<Edit> edits;
  for (const auto& cell : cells) {
    if (cell.cell_type != "code" || !cell.has_source) continue;
    nlohmann::json value;
    try {
      value = nlohmann::json::parse(document.substr(cell.source_begin, cell.source_end - cell.source_begin));
    } catch (const nlohmann::json::exception& ex) {
      throw NotebookError(std::string("malformed notebook: ") + ex.what());
    }
    syntax::SourceText src;
    src.text = source_text(value);
    src.origin.kind = syntax::Origin::Kind::NotebookCell;
    src.origin.id = cell.id.empty() ? "cell-" + std::to_string(cell.index) : cell.id;
    auto r = rewrite_cell(src, history, registry);
    if (r.report.outcome == Outcome::Rewritten)
      edits.push_back({cell.source_begin, cell.source_end, serialize_source(document, cell, r.text)});
    result.reports.push_back(std::move(r.report));
    history.append(std::move(src.text));
  }

  result.changed = !edits.empty();
  if (!result.changed) {
    result.text = std::string(document);
    return result;
  }
  std::size_t pos = 0;
  for (const auto& e : edits) {
    result.text.append(document.substr(pos, e.begin - pos));
    result.text += e.text;
    pos = e.end;
  }
  result.text.append(document.substr(pos));
  return result;
}

// Diffs

std::string unified_diff(std::string_view a, std::string_view b, std::string_view label_a, std::string_view label_b,
                         int context) {
  auto x = split_keep_newlines(a);
  auto y = split_keep_newlines(b);
  std::size_t n = x.size(), m = y.size();
  std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = x[i] == y[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  struct Op {
    char tag;
    std::size_t i, j;  // positions before the op
  };
  std::vector<Op> ops;
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && x[i] == y[j]) {
      ops.push_back({' ', i++, j++});
    } else if (i < n && (j == m || lcs[i + 1][j] >= lcs[i][j + 1])) {
      ops.push_back({'-', i++, j});
    } else {
      ops.push_back({'+', i, j++});
    }
  }

  auto line_of = [&](const Op& op) -> std::string {
    std::string s = op.tag == '+' ? y[op.j] : x[op.i];
    if (s.empty() || s.back() != '\n') s += "\n\\ No newline at end of file\n";
    return std::string(1, op.tag) + s;
  };

  std::string out;
  std::size_t k = 0;
  while (k < ops.size()) {
    while (k < ops.size() && ops[k].tag == ' ') ++k;
    if (k == ops.size()) break;
    std::size_t start = k >= static_cast<std::size_t>(context) ? k - context : 0;
    std::size_t end = k;
    // Extend the hunk while changes are within 2 * context lines.
    for (;;) {
      while (end < ops.size() && ops[end].tag != ' ') ++end;
      std::size_t gap = end;
      while (gap < ops.size() && ops[gap].tag == ' ') ++gap;
      if (gap < ops.size() && gap - end <= static_cast<std::size_t>(2 * context)) {
        end = gap;
        continue;
      }
      end = std::min(ops.size(), end + context);
      break;
    }
    std::size_t ca = 0, cb = 0;
    for (std::size_t t = start; t < end; ++t) {
      if (ops[t].tag != '+') ++ca;
      if (ops[t].tag != '-') ++cb;
    }
    auto a0 = ops[start].i + (ca ? 1 : 0), b0 = ops[start].j + (cb ? 1 : 0);
    if (out.empty()) out += "--- " + std::string(label_a) + "\n+++ " + std::string(label_b) + "\n";
    out += "@@ -" + std::to_string(a0) + "," + std::to_string(ca) + " +" + std::to_string(b0) + "," +
           std::to_string(cb) + " @@\n";
    for (std::size_t t = start; t < end; ++t) out += line_of(ops[t]);
    k = end;
  }
  return out;
}

std::string explain(std::string_view text, const History& history, const rules::Registry& registry) {
  auto r = rewrite_cell(text, history, registry);
  std::string out = unified_diff(text, r.text);
  if (out.empty()) out = "no changes (" + std::string(outcome_name(r.report.outcome)) + ")\n";
  out += "\nrule              lines    guard\n";
  for (const auto& m : r.report.matches) {
    std::string lines = std::to_string(m.first_line) + "-" + std::to_string(m.last_line);
    std::string rule = m.rule;
    rule.resize(std::max<std::size_t>(rule.size() + 1, 18), ' ');
    lines.resize(std::max<std::size_t>(lines.size() + 1, 9), ' ');
    out += rule + lines + m.guard_summary + "\n";
  }
  for (const auto& s : r.report.skipped) out += "skipped: " + s + "\n";
  return out;
}

}  // namespace cellrw::driver
