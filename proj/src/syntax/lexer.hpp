#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cellrw::syntax::detail {

enum class TokenKind : std::uint8_t { Name, Number, String, Op, Newline, Indent, Dedent, EndMarker, Hole };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::uint32_t begin;
  std::uint32_t end;
};

struct SyntaxError : std::runtime_error {
  SyntaxError(const std::string& msg, std::uint32_t at) : std::runtime_error(msg), offset(at) {}
  std::uint32_t offset;
};

std::vector<Token> tokenize(std::string_view src, bool template_mode);

bool is_string_prefix(std::string_view s);

}  // namespace cellrw::syntax::detail
