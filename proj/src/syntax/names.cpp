#include "cellrw/syntax/names.hpp"

#include <cctype>

namespace cellrw::syntax {

bool structurally_equal(const Node* a, const Node* b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->text != b->text || a->constant != b->constant || a->flag != b->flag ||
      a->level != b->level || a->ops != b->ops || a->hole != b->hole || a->kids.size() != b->kids.size())
    return false;
  if (a->kind == NodeKind::Alias && a->text2 != b->text2) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!structurally_equal(a->kids[i].get(), b->kids[i].get())) return false;
  return true;
}

void harvest_identifiers(std::string_view text, std::set<std::string>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    auto c = static_cast<unsigned char>(text[i]);
    if (std::isalpha(c) || c == '_' || c >= 0x80) {
      std::size_t j = i;
      while (j < text.size()) {
        auto d = static_cast<unsigned char>(text[j]);
        if (!(std::isalnum(d) || d == '_' || d >= 0x80)) break;
        ++j;
      }
      out.emplace(text.substr(i, j - i));
      i = j;
    } else {
      ++i;
    }
  }
}

void harvest_identifiers(const Node& root, std::set<std::string>& out) {
  walk(root, [&](const Node& n) {
    switch (n.kind) {
      case NodeKind::Name:
      case NodeKind::Attribute:
      case NodeKind::Arg:
      case NodeKind::Keyword:
      case NodeKind::FunctionDef:
      case NodeKind::ClassDef:
      case NodeKind::ExceptHandler:
      case NodeKind::MatchAs:
      case NodeKind::MatchStar:
      case NodeKind::MatchMapping:
      case NodeKind::TypeVar:
      case NodeKind::ParamSpec:
      case NodeKind::TypeVarTuple:
        if (!n.text.empty()) out.insert(n.text);
        break;
      case NodeKind::Alias:
      case NodeKind::ImportFrom:
        harvest_identifiers(n.text, out);
        harvest_identifiers(n.text2, out);
        break;
      case NodeKind::Global:
      case NodeKind::Nonlocal:
      case NodeKind::MatchClass:
        for (const auto& s : n.ops) out.insert(s);
        break;
      case NodeKind::JoinedStr:
        for (const auto& s : n.ops) harvest_identifiers(s, out);
        break;
      default: break;
    }
  });
}

bool contains_sentinel(const Node& root) {
  std::set<std::string> ids;
  harvest_identifiers(root, ids);
  for (const auto& id : ids)
    if (id.find(kReservedPrefix) != std::string::npos) return true;
  return false;
}

std::string FreshNamePool::fresh(std::string_view base) {
  std::string stem = std::string(kReservedPrefix) + std::string(base.empty() ? "t" : base);
  std::string name = stem;
  for (int i = 1; forbidden_.count(name); ++i) name = stem + "_" + std::to_string(i);
  forbidden_.insert(name);
  return name;
}

}  // namespace cellrw::syntax
