#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

#include "cellrw/syntax/ast.hpp"
#include "cellrw/syntax/source.hpp"

namespace cellrw::syntax {

// Supported grammar: Python 3.12. F-strings are tokenized per PEP 701 but
// kept as opaque JoinedStr nodes.
struct ParseFailure {
  int line = 1;
  int col = 0;
  std::uint32_t offset = 0;
  std::string message;
};

using ParseResult = std::variant<Module, ParseFailure>;

ParseResult parse_module(const SourceText& src);
ParseResult parse_module(std::string_view text);

// Template mode additionally accepts holes written @{Kind: binder},
// @{binder} and @{$fresh}.
ParseResult parse_template(std::string_view text);

// Parses a single expression (the whole input must be one expression).
std::variant<NodePtr, ParseFailure> parse_expression(std::string_view text, bool template_mode = false);

inline bool ok(const ParseResult& r) { return std::holds_alternative<Module>(r); }

}  // namespace cellrw::syntax
