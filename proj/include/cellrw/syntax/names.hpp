#pragma once

#include <set>
#include <string>
#include <string_view>

#include "cellrw/syntax/ast.hpp"

namespace cellrw::syntax {

inline constexpr std::string_view kReservedPrefix = "__cellrw_";

bool structurally_equal(const Node* a, const Node* b);

// Identifiers appearing anywhere in a fragment, including names, attributes,
// parameters, aliases and identifier-like runs inside f-string pieces.
void harvest_identifiers(const Node& n, std::set<std::string>& out);
// Identifier-like runs of raw text (used for unparsable history chunks).
void harvest_identifiers(std::string_view text, std::set<std::string>& out);

bool contains_sentinel(const Node& n);

class FreshNamePool {
 public:
  FreshNamePool() = default;
  explicit FreshNamePool(std::set<std::string> forbidden) : forbidden_(std::move(forbidden)) {}

  std::string fresh(std::string_view base);
  void forbid(std::string name) { forbidden_.insert(std::move(name)); }
  bool is_forbidden(const std::string& name) const { return forbidden_.count(name) != 0; }
  const std::set<std::string>& forbidden() const { return forbidden_; }
  std::string_view reserved_prefix() const { return kReservedPrefix; }

 private:
  std::set<std::string> forbidden_;
};

inline std::string fresh_name(FreshNamePool& pool, std::string_view base) { return pool.fresh(base); }

}  // namespace cellrw::syntax
