#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cellrw/syntax/ast.hpp"

namespace cellrw::syntax {

// Canonical formatting, following CPython 3.12's ast.unparse.
std::string unparse(const Module& m);
std::string unparse_module_node(const Node& module);

// Statements at `indent`. The indent is written after each newline, so the
// first line carries none; string contents are untouched. No trailing newline.
std::string unparse_statements(const std::vector<const Node*>& stmts, std::string_view indent = {},
                               std::string_view newline = "\n");
std::string unparse_statement(const Node& stmt);
std::string unparse_expr(const Node& expr);

// Python repr() of literal values.
std::string repr_str(std::string_view utf8);
std::string repr_bytes(std::string_view bytes);
// repr(float) for a finite or infinite double.
std::string repr_float(double v);

}  // namespace cellrw::syntax
