#include "lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace cellrw::syntax::detail {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }
bool is_newline(char c) { return c == '\n' || c == '\r'; }

// Longest first.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "**", "//", ">>", "<<", "<=",
    ">=",  "==",  "!=",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "@=",
    "+",   "-",   "*",   "/",   "%",   "@",  "&",  "|",  "^",  "~",  "<",  ">",
    "(",   ")",   "[",   "]",   "{",   "}",  ",",  ":",  ".",  ";",  "=",
};

class Lexer {
 public:
  Lexer(std::string_view src, bool template_mode) : src_(src), n_(src.size()), template_(template_mode) {}

  std::vector<Token> run();

 private:
  std::size_t skip_newline(std::size_t i) const {
    if (src_[i] == '\r' && i + 1 < n_ && src_[i + 1] == '\n') return i + 2;
    return i + 1;
  }
  void push(TokenKind k, std::size_t b, std::size_t e) {
    out_.push_back({k, src_.substr(b, e - b), static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(e)});
  }
  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw SyntaxError(msg, static_cast<std::uint32_t>(std::min(at, n_)));
  }

  std::size_t scan_string(std::size_t begin, std::size_t quote);
  std::size_t scan_fstring_body(std::size_t j, std::size_t begin, char q, bool triple, bool raw);
  std::size_t scan_fstring_field(std::size_t j, std::size_t begin, char q, bool triple);
  std::size_t scan_format_spec(std::size_t j, std::size_t begin, char q, bool triple);
  std::size_t scan_number(std::size_t i);
  bool closes_quote(std::size_t j, char q, bool triple) const {
    if (src_[j] != q) return false;
    return !triple || (j + 2 < n_ && src_[j + 1] == q && src_[j + 2] == q);
  }

  std::string_view src_;
  std::size_t n_;
  bool template_;
  std::vector<Token> out_;
};

std::size_t Lexer::scan_string(std::size_t begin, std::size_t quote) {
  std::string_view prefix = src_.substr(begin, quote - begin);
  bool raw = prefix.find_first_of("rR") != std::string_view::npos;
  bool fstr = prefix.find_first_of("fF") != std::string_view::npos;
  char q = src_[quote];
  bool triple = quote + 2 < n_ && src_[quote + 1] == q && src_[quote + 2] == q;
  std::size_t j = quote + (triple ? 3 : 1);
  if (fstr) return scan_fstring_body(j, begin, q, triple, raw);
  while (true) {
    if (j >= n_) fail(triple ? "unterminated triple-quoted string literal" : "unterminated string literal", begin);
    char d = src_[j];
    if (d == '\\') {
      j += (j + 2 < n_ && src_[j + 1] == '\r' && src_[j + 2] == '\n') ? 3 : 2;
      continue;
    }
    if (!triple && is_newline(d)) fail("unterminated string literal", begin);
    if (closes_quote(j, q, triple)) return j + (triple ? 3 : 1);
    ++j;
  }
}

std::size_t Lexer::scan_fstring_body(std::size_t j, std::size_t begin, char q, bool triple, bool raw) {
  while (true) {
    if (j >= n_) fail("unterminated f-string literal", begin);
    char d = src_[j];
    if (d == '\\') {
      if (j + 1 < n_ && (src_[j + 1] == '{' || src_[j + 1] == '}')) {
        ++j;
        continue;
      }
      if (!raw && j + 2 < n_ && src_[j + 1] == 'N' && src_[j + 2] == '{') {
        auto close = src_.find('}', j + 3);
        if (close == std::string_view::npos) fail("unterminated f-string literal", begin);
        j = close + 1;
        continue;
      }
      j += 2;
      continue;
    }
    if (!triple && is_newline(d)) fail("unterminated f-string literal", begin);
    if (closes_quote(j, q, triple)) return j + (triple ? 3 : 1);
    if (d == '{') {
      if (j + 1 < n_ && src_[j + 1] == '{') {
        j += 2;
        continue;
      }
      j = scan_fstring_field(j + 1, begin, q, triple);
      continue;
    }
    if (d == '}') {
      if (j + 1 < n_ && src_[j + 1] == '}') {
        j += 2;
        continue;
      }
      fail("f-string: single '}' is not allowed", j);
    }
    ++j;
  }
}

// Scans a replacement field after its opening brace; returns the offset
// after the closing brace.
std::size_t Lexer::scan_fstring_field(std::size_t j, std::size_t begin, char q, bool triple) {
  int depth = 0;
  std::size_t start = j;
  while (true) {
    if (j >= n_) fail("f-string: expecting '}'", begin);
    unsigned char d = static_cast<unsigned char>(src_[j]);
    if (ident_start(d)) {
      std::size_t e = j;
      while (e < n_ && ident_char(static_cast<unsigned char>(src_[e]))) ++e;
      if (e < n_ && (src_[e] == '\'' || src_[e] == '"') && is_string_prefix(src_.substr(j, e - j))) {
        j = scan_string(j, e);
      } else {
        j = e;
      }
      continue;
    }
    if (d == '\'' || d == '"') {
      j = scan_string(j, j);
      continue;
    }
    if (d == '#') {
      while (j < n_ && !is_newline(src_[j])) ++j;
      continue;
    }
    if (d == '(' || d == '[' || d == '{') {
      ++depth;
    } else if (d == ')' || d == ']') {
      --depth;
    } else if (d == '}') {
      if (depth == 0) {
        if (j == start) fail("f-string: valid expression required before '}'", j);
        return j + 1;
      }
      --depth;
    } else if (depth == 0 && d == '!' && j + 1 < n_ && src_[j + 1] != '=') {
      ++j;
      while (j < n_ && ident_char(static_cast<unsigned char>(src_[j]))) ++j;
      continue;
    } else if (depth == 0 && d == ':') {
      return scan_format_spec(j + 1, begin, q, triple);
    } else if (d == '\\') {
      fail("f-string expression part cannot include a backslash", j);
    }
    ++j;
  }
}

std::size_t Lexer::scan_format_spec(std::size_t j, std::size_t begin, char q, bool triple) {
  while (true) {
    if (j >= n_) fail("f-string: expecting '}'", begin);
    char d = src_[j];
    if (d == '}') return j + 1;
    if (d == '{') {
      j = scan_fstring_field(j + 1, begin, q, triple);
      continue;
    }
    if (d == '\\') {
      j += 2;
      continue;
    }
    if (!triple && is_newline(d)) fail("unterminated f-string literal", begin);
    if (closes_quote(j, q, triple)) fail("f-string: expecting '}'", j);
    ++j;
  }
}

std::size_t Lexer::scan_number(std::size_t i) {
  auto digits = [&](std::size_t j, auto pred) {
    bool any = false;
    while (j < n_) {
      unsigned char c = static_cast<unsigned char>(src_[j]);
      if (pred(c)) {
        any = true;
        ++j;
      } else if (c == '_' && any && j + 1 < n_ && pred(static_cast<unsigned char>(src_[j + 1]))) {
        ++j;
      } else {
        break;
      }
    }
    return j;
  };
  auto dec = [](unsigned char c) { return std::isdigit(c) != 0; };
  std::size_t j = i;
  if (src_[j] == '0' && j + 1 < n_ && std::string_view("xXoObB").find(src_[j + 1]) != std::string_view::npos) {
    char base = static_cast<char>(std::tolower(src_[j + 1]));
    j += 2;
    if (j < n_ && src_[j] == '_') ++j;
    std::size_t e = 0;
    if (base == 'x') e = digits(j, [](unsigned char c) { return std::isxdigit(c) != 0; });
    if (base == 'o') e = digits(j, [](unsigned char c) { return c >= '0' && c <= '7'; });
    if (base == 'b') e = digits(j, [](unsigned char c) { return c == '0' || c == '1'; });
    if (e == j) fail("invalid number literal", i);
    if (e < n_ && (std::isalnum(static_cast<unsigned char>(src_[e])) || src_[e] == '_'))
      fail("invalid digit in number literal", e);
    return e;
  }
  bool is_float = false;
  if (src_[j] != '.') {
    j = digits(j, dec);
  }
  if (j < n_ && src_[j] == '.') {
    is_float = true;
    ++j;
    if (j < n_ && std::isdigit(static_cast<unsigned char>(src_[j]))) j = digits(j, dec);
  }
  if (j < n_ && (src_[j] == 'e' || src_[j] == 'E')) {
    std::size_t k = j + 1;
    if (k < n_ && (src_[k] == '+' || src_[k] == '-')) ++k;
    if (k < n_ && std::isdigit(static_cast<unsigned char>(src_[k]))) {
      j = digits(k, dec);
      is_float = true;
    }
  }
  if (j < n_ && (src_[j] == 'j' || src_[j] == 'J')) {
    ++j;
    return j;
  }
  if (!is_float) {
    std::string_view lit = src_.substr(i, j - i);
    if (lit.size() > 1 && lit[0] == '0' && lit.find_first_not_of("0_") != std::string_view::npos)
      fail("leading zeros in decimal integer literals are not permitted", i);
  }
  if (j < n_ && src_[j] == '_') fail("invalid decimal literal", j);
  return j;
}

std::vector<Token> Lexer::run() {
  std::vector<int> indents{0};
  std::vector<std::pair<char, std::size_t>> brackets;
  std::size_t i = 0;
  bool line_start = true;
  out_.reserve(n_ / 3 + 8);
  while (true) {
    if (line_start && brackets.empty()) {
      int col = 0;
      std::size_t j = i;
      for (; j < n_; ++j) {
        char c = src_[j];
        if (c == ' ') ++col;
        else if (c == '\t') col = (col / 8 + 1) * 8;
        else if (c == '\f') col = 0;
        else break;
      }
      if (j >= n_) {
        i = j;
        break;
      }
      char c = src_[j];
      if (c == '#' || is_newline(c)) {
        while (j < n_ && !is_newline(src_[j])) ++j;
        if (j >= n_) {
          i = j;
          break;
        }
        i = skip_newline(j);
        continue;
      }
      if (c == '\\' && j + 1 < n_ && is_newline(src_[j + 1])) {
        // A continuation before any token joins with the next line.
        i = skip_newline(j + 1);
        continue;
      }
      if (col > indents.back()) {
        indents.push_back(col);
        push(TokenKind::Indent, j, j);
      } else {
        while (col < indents.back()) {
          indents.pop_back();
          push(TokenKind::Dedent, j, j);
        }
        if (col != indents.back()) fail("unindent does not match any outer indentation level", j);
      }
      i = j;
      line_start = false;
    }
    if (i >= n_) break;
    unsigned char c = static_cast<unsigned char>(src_[i]);
    if (c == ' ' || c == '\t' || c == '\f') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < n_ && !is_newline(src_[i])) ++i;
      continue;
    }
    if (c == '\\') {
      if (i + 1 < n_ && is_newline(src_[i + 1])) {
        i = skip_newline(i + 1);
        if (i >= n_) fail("unexpected EOF after line continuation", i);
        continue;
      }
      fail("unexpected character after line continuation character", i);
    }
    if (is_newline(static_cast<char>(c))) {
      std::size_t e = skip_newline(i);
      if (brackets.empty()) {
        push(TokenKind::Newline, i, e);
        line_start = true;
      }
      i = e;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < n_ && ident_char(static_cast<unsigned char>(src_[j]))) ++j;
      if (j < n_ && (src_[j] == '\'' || src_[j] == '"') && is_string_prefix(src_.substr(i, j - i))) {
        std::size_t e = scan_string(i, j);
        push(TokenKind::String, i, e);
        i = e;
        continue;
      }
      push(TokenKind::Name, i, j);
      i = j;
      continue;
    }
    if (c == '\'' || c == '"') {
      std::size_t e = scan_string(i, i);
      push(TokenKind::String, i, e);
      i = e;
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < n_ && std::isdigit(static_cast<unsigned char>(src_[i + 1])))) {
      std::size_t e = scan_number(i);
      push(TokenKind::Number, i, e);
      i = e;
      continue;
    }
    if (template_ && c == '@' && i + 1 < n_ && src_[i + 1] == '{') {
      auto close = src_.find('}', i + 2);
      if (close == std::string_view::npos) fail("unterminated hole", i);
      push(TokenKind::Hole, i, close + 1);
      i = close + 1;
      continue;
    }
    std::string_view rest = src_.substr(i);
    auto op = std::find_if(kOperators.begin(), kOperators.end(),
                           [&](std::string_view o) { return rest.substr(0, o.size()) == o; });
    if (op == kOperators.end()) fail(std::string("invalid character '") + static_cast<char>(c) + "'", i);
    char oc = (*op)[0];
    if (op->size() == 1) {
      if (oc == '(' || oc == '[' || oc == '{') {
        brackets.emplace_back(oc, i);
      } else if (oc == ')' || oc == ']' || oc == '}') {
        char want = oc == ')' ? '(' : oc == ']' ? '[' : '{';
        if (brackets.empty()) fail(std::string("unmatched '") + oc + "'", i);
        if (brackets.back().first != want) fail("closing bracket does not match", i);
        brackets.pop_back();
      }
    }
    push(TokenKind::Op, i, i + op->size());
    i += op->size();
  }
  if (!brackets.empty()) fail("'" + std::string(1, brackets.back().first) + "' was never closed", brackets.back().second);
  if (!out_.empty() && out_.back().kind != TokenKind::Newline && out_.back().kind != TokenKind::Dedent)
    push(TokenKind::Newline, n_, n_);
  while (indents.size() > 1) {
    indents.pop_back();
    push(TokenKind::Dedent, n_, n_);
  }
  push(TokenKind::EndMarker, n_, n_);
  return std::move(out_);
}

}  // namespace

bool is_string_prefix(std::string_view s) {
  if (s.empty() || s.size() > 2) return false;
  std::string low;
  for (char c : s) low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  static constexpr std::array<std::string_view, 8> kPrefixes = {"r", "u", "f", "b", "br", "rb", "fr", "rf"};
  return std::find(kPrefixes.begin(), kPrefixes.end(), std::string_view(low)) != kPrefixes.end();
}

std::vector<Token> tokenize(std::string_view src, bool template_mode) { return Lexer(src, template_mode).run(); }

}  // namespace cellrw::syntax::detail
