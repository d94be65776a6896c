#include "support.hpp"

#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "cellrw/syntax/names.hpp"
#include "cellrw/syntax/parser.hpp"
#include "cellrw/syntax/unparse.hpp"

namespace cellrw::testing {

using namespace syntax;

std::filesystem::path data_path(std::string_view rel) { return std::filesystem::path(CELLRW_TEST_DATA) / rel; }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_cells(std::string_view text) {
  std::vector<std::string> cells;
  std::string cur;
  bool started = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto end = nl == std::string_view::npos ? text.size() : nl + 1;
    auto line = text.substr(pos, end - pos);
    if (line.substr(0, 4) == "# %%") {
      if (started) cells.push_back(cur);
      cur.clear();
      started = true;
    } else {
      cur += line;
    }
    pos = end;
  }
  if (started) cells.push_back(cur);
  return cells;
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {
      "sort_head", "concat_lists", "split_columns", "split_targets", "apply_math", "apply_select", "substr_lambda",
  };
  return names;
}

std::string canonical(std::string_view code) {
  auto r = parse_module(code);
  if (!ok(r)) throw std::runtime_error("does not parse: " + std::get<ParseFailure>(r).message);
  return unparse(std::get<Module>(r));
}

std::string canonicalize_temps(std::string_view code) {
  std::string text = canonical(code);
  static const std::regex temp("__cellrw_[A-Za-z0-9_]*");
  std::map<std::string, std::string> renamed;
  std::string out;
  auto last = text.cbegin();
  for (std::sregex_iterator it(text.begin(), text.end(), temp), end; it != end; ++it) {
    out.append(last, text.cbegin() + it->position());
    auto [slot, fresh] = renamed.emplace(it->str(), "");
    if (fresh) slot->second = "__cellrw_t" + std::to_string(renamed.size() - 1);
    out += slot->second;
    last = text.cbegin() + it->position() + it->length();
  }
  out.append(last, text.cend());
  return out;
}

namespace {

bool generated(const Node& n) {
  return n.kind == NodeKind::Name && n.text.rfind(kReservedPrefix, 0) == 0;
}

std::string base_name(const std::string& id) {
  std::string base = id.substr(kReservedPrefix.size());
  static const std::regex suffix("_[0-9]+$");
  return std::regex_replace(base, suffix, "");
}

void substitute(NodePtr& slot, const std::map<std::string, const Node*>& hoisted) {
  if (!slot) return;
  if (generated(*slot)) {
    auto it = hoisted.find(slot->text);
    slot = it != hoisted.end() ? clone(*it->second, true) : make_name(base_name(slot->text));
    return;
  }
  for (auto& k : slot->kids) substitute(k, hoisted);
}

}  // namespace

std::string strip_guard(std::string_view rewritten) {
  auto r = parse_module(rewritten);
  if (!ok(r)) throw std::runtime_error("rewritten code does not parse");
  const Module& m = std::get<Module>(r);

  std::map<std::string, const Node*> hoisted;
  std::vector<NodePtr> kept;
  for (const auto& s : m.body()) {
    if (s->kind == NodeKind::Assign && s->kid(0)->kids.size() == 1 && generated(*s->kid(0)->kid(0))) {
      hoisted[s->kid(0)->kid(0)->text] = s->kid(1);
      continue;
    }
    if (s->kind == NodeKind::Try && contains_sentinel(*s)) continue;
    if (s->kind == NodeKind::Expr && generated(*s->kid(0))) continue;
    if (s->kind == NodeKind::If && generated(*s->kid(0))) {
      for (const auto& t : s->kid(1)->kids) {
        NodePtr c = clone(*t, true);
        if (c->kind == NodeKind::Assign && c->kid(0)->kids.size() == 1 && generated(*c->kid(0)->kid(0)) &&
            base_name(c->kid(0)->kid(0)->text) == "res") {
          auto e = make_node(NodeKind::Expr);
          e->kids.push_back(std::move(c->kids[1]));
          c = std::move(e);
        }
        kept.push_back(std::move(c));
      }
      continue;
    }
    kept.push_back(clone(*s, true));
  }
  std::vector<const Node*> out;
  for (auto& s : kept) {
    substitute(s, hoisted);
    out.push_back(s.get());
  }
  return unparse_statements(out);
}

}  // namespace cellrw::testing
