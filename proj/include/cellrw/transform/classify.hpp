#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cellrw/syntax/ast.hpp"

namespace cellrw::transform {

using syntax::Node;
using syntax::NodePtr;

struct FunctionClassification {
  enum class Kind { ColumnMathOnly, IfElseVectorizable, SubstringSearch, Unknown };

  struct Branch {
    const Node* condition = nullptr;
    const Node* value = nullptr;  // returned constant
  };

  Kind kind = Kind::Unknown;
  std::vector<Branch> branches;
  const Node* default_value = nullptr;
  std::string needle;
  // Constant column keys read from the row parameter.
  std::set<std::string> columns;
  std::string reason;  // why the function is Unknown
};

std::string_view classification_name(FunctionClassification::Kind k);

// `fn` is a FunctionDef or Lambda whose first parameter is `row_param`.
FunctionClassification classify_apply_target(const Node& fn, std::string_view row_param);

// Facts about a translated condition that the emitted guard must check.
struct VectorizeNeeds {
  std::set<std::string> columns;
  std::set<std::string> str_columns;  // columns used through .str accessors
  std::set<std::string> containers;   // free names used as `in` containers
};

// Row-wise condition to a whole-column boolean expression over `frame`.
// Returns nullopt for anything outside the translation table.
std::optional<NodePtr> vectorize_condition(const Node& cond, std::string_view row_param, const Node& frame,
                                           VectorizeNeeds* needs = nullptr);

// Operations of a ColumnMathOnly function whose scalar and vectorized
// behaviour can differ.
struct ArithmeticHazards {
  bool power = false;
  // Right operands of /, // and %, rewritten over `frame`. Parameters read
  // their stored defaults through `fun`.
  std::vector<NodePtr> divisors;
  // Columns the returned expression reads, directly or through locals.
  std::set<std::string> columns;
};

std::optional<ArithmeticHazards> arithmetic_hazards(const Node& def, std::string_view row_param, const Node& frame,
                                                    std::string_view fun);

}  // namespace cellrw::transform
