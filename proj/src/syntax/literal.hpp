#pragma once

#include <string>
#include <string_view>

#include "cellrw/syntax/ast.hpp"

namespace cellrw::syntax::detail {

struct NumberValue {
  ConstKind kind;
  std::string text;  // Int: decimal digits; Float: repr; Complex: repr of the imaginary part
};

// Throws std::invalid_argument on malformed input.
NumberValue decode_number(std::string_view literal);

struct StringValue {
  bool bytes = false;
  bool fstring = false;
  bool opaque = false;  // value could not be decoded exactly (\N{...})
  std::string value;
};

// `literal` is one full token including prefix and quotes.
StringValue decode_string(std::string_view literal);

// repr() of a double; `add_dot_zero` false gives the complex-component form.
std::string format_float(double v, bool add_dot_zero);

void append_utf8(std::string& out, char32_t cp);
// Decodes one code point at `i`; invalid bytes decode as themselves.
char32_t next_code_point(std::string_view s, std::size_t& i);
bool is_printable(char32_t cp);

}  // namespace cellrw::syntax::detail
