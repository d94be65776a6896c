#include "literal.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <vector>

namespace cellrw::syntax::detail {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

// Little-endian base-10^9 limbs.
std::string to_decimal(std::string_view digits, int base) {
  std::vector<std::uint32_t> limbs{0};
  for (char c : digits) {
    if (c == '_') continue;
    int d = hex_value(c);
    std::uint64_t carry = static_cast<std::uint64_t>(d);
    for (auto& limb : limbs) {
      std::uint64_t cur = static_cast<std::uint64_t>(limb) * base + carry;
      limb = static_cast<std::uint32_t>(cur % 1000000000u);
      carry = cur / 1000000000u;
    }
    while (carry) {
      limbs.push_back(static_cast<std::uint32_t>(carry % 1000000000u));
      carry /= 1000000000u;
    }
  }
  std::string out = std::to_string(limbs.back());
  for (std::size_t i = limbs.size() - 1; i-- > 0;) {
    std::string part = std::to_string(limbs[i]);
    out += std::string(9 - part.size(), '0') + part;
  }
  return out;
}

double parse_double(std::string_view text) {
  std::string clean;
  for (char c : text)
    if (c != '_') clean.push_back(c);
  double v = 0;
  auto [ptr, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), v);
  if (ec == std::errc::result_out_of_range) return HUGE_VAL;
  if (ec != std::errc() || ptr != clean.data() + clean.size()) throw std::invalid_argument("bad float literal");
  return v;
}

}  // namespace

NumberValue decode_number(std::string_view lit) {
  if (lit.empty()) throw std::invalid_argument("empty number");
  char last = lit.back();
  if (last == 'j' || last == 'J') {
    return {ConstKind::Complex, format_float(parse_double(lit.substr(0, lit.size() - 1)), false)};
  }
  if (lit.size() > 2 && lit[0] == '0') {
    char b = static_cast<char>(std::tolower(static_cast<unsigned char>(lit[1])));
    int base = b == 'x' ? 16 : b == 'o' ? 8 : b == 'b' ? 2 : 0;
    if (base) return {ConstKind::Int, to_decimal(lit.substr(2), base)};
  }
  if (lit.find_first_of(".eE") != std::string_view::npos)
    return {ConstKind::Float, format_float(parse_double(lit), true)};
  return {ConstKind::Int, to_decimal(lit, 10)};
}

std::string format_float(double v, bool add_dot_zero) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  std::string out;
  if (s.front() == '-') {
    out.push_back('-');
    s.remove_prefix(1);
  }
  auto e = s.find('e');
  std::string digits;
  for (char c : s.substr(0, e))
    if (c != '.') digits.push_back(c);
  int exp = std::atoi(std::string(s.substr(e + 1)).c_str());
  if (digits == "0") exp = 0;
  int decpt = exp + 1;
  if (decpt > -4 && decpt <= 16) {
    if (decpt <= 0) {
      out += "0." + std::string(static_cast<std::size_t>(-decpt), '0') + digits;
    } else if (static_cast<std::size_t>(decpt) >= digits.size()) {
      out += digits + std::string(static_cast<std::size_t>(decpt) - digits.size(), '0');
      if (add_dot_zero) out += ".0";
    } else {
      out += digits.substr(0, static_cast<std::size_t>(decpt)) + "." + digits.substr(static_cast<std::size_t>(decpt));
    }
    return out;
  }
  out.push_back(digits[0]);
  if (digits.size() > 1) out += "." + digits.substr(1);
  int x = decpt - 1;
  out += x < 0 ? "e-" : "e+";
  std::string xs = std::to_string(std::abs(x));
  if (xs.size() < 2) xs = "0" + xs;
  return out + xs;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

char32_t next_code_point(std::string_view s, std::size_t& i) {
  auto b0 = static_cast<unsigned char>(s[i]);
  int len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len <= 1 || i + static_cast<std::size_t>(len) > s.size()) {
    ++i;
    return b0;
  }
  char32_t cp = b0 & (0x7F >> len);
  for (int k = 1; k < len; ++k) {
    auto b = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return b0;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += static_cast<std::size_t>(len);
  return cp;
}

// Approximates str.isprintable(): control, separator (other than space),
// format, surrogate and private-use code points are not printable.
bool is_printable(char32_t cp) {
  if (cp < 0x20 || cp == 0x7F) return false;
  if (cp < 0x7F) return true;
  struct Range {
    char32_t lo, hi;
  };
  static constexpr Range kHidden[] = {
      {0x80, 0xA0},       {0xAD, 0xAD},       {0x600, 0x605},     {0x61C, 0x61C},   {0x6DD, 0x6DD},
      {0x70F, 0x70F},     {0x890, 0x891},     {0x8E2, 0x8E2},     {0x1680, 0x1680}, {0x180E, 0x180E},
      {0x2000, 0x200F},   {0x2028, 0x202F},   {0x205F, 0x2064},   {0x2066, 0x206F}, {0x3000, 0x3000},
      {0xD800, 0xF8FF},   {0xFEFF, 0xFEFF},   {0xFFF9, 0xFFFB},   {0x110BD, 0x110BD}, {0x110CD, 0x110CD},
      {0x13430, 0x1343F}, {0x1BCA0, 0x1BCA3}, {0x1D173, 0x1D17A}, {0xE0000, 0xE0FFF}, {0xF0000, 0x10FFFF},
  };
  for (const auto& r : kHidden)
    if (cp >= r.lo && cp <= r.hi) return false;
  if ((cp >= 0xFDD0 && cp <= 0xFDEF) || (cp & 0xFFFE) == 0xFFFE) return false;
  return cp <= 0x10FFFF;
}

StringValue decode_string(std::string_view lit) {
  StringValue sv;
  std::size_t q = 0;
  while (q < lit.size() && lit[q] != '\'' && lit[q] != '"') ++q;
  std::string_view prefix = lit.substr(0, q);
  bool raw = false;
  for (char c : prefix) {
    char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (l == 'r') raw = true;
    if (l == 'b') sv.bytes = true;
    if (l == 'f') sv.fstring = true;
  }
  char quote = lit[q];
  bool triple = lit.size() >= q + 6 && lit[q + 1] == quote && lit[q + 2] == quote;
  std::size_t qlen = triple ? 3 : 1;
  std::string_view body = lit.substr(q + qlen, lit.size() - q - 2 * qlen);
  if (sv.fstring) return sv;
  if (raw) {
    sv.value.assign(body);
    return sv;
  }
  std::string& out = sv.value;
  out.reserve(body.size());
  for (std::size_t i = 0; i < body.size();) {
    char c = body[i];
    if (c != '\\' || i + 1 >= body.size()) {
      out.push_back(c);
      ++i;
      continue;
    }
    char e = body[i + 1];
    i += 2;
    switch (e) {
      case '\n': break;
      case '\r':
        if (i < body.size() && body[i] == '\n') ++i;
        break;
      case '\\': out.push_back('\\'); break;
      case '\'': out.push_back('\''); break;
      case '"': out.push_back('"'); break;
      case 'a': out.push_back('\a'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case 'v': out.push_back('\v'); break;
      case 'x': {
        if (i + 2 > body.size() || hex_value(body[i]) < 0 || hex_value(body[i + 1]) < 0)
          throw std::invalid_argument("truncated \\xXX escape");
        int v = hex_value(body[i]) * 16 + hex_value(body[i + 1]);
        i += 2;
        if (sv.bytes) out.push_back(static_cast<char>(v));
        else append_utf8(out, static_cast<char32_t>(v));
        break;
      }
      case 'u':
      case 'U': {
        if (sv.bytes) {
          out.push_back('\\');
          out.push_back(e);
          break;
        }
        std::size_t len = e == 'u' ? 4 : 8;
        if (i + len > body.size()) throw std::invalid_argument("truncated unicode escape");
        char32_t v = 0;
        for (std::size_t k = 0; k < len; ++k) {
          int h = hex_value(body[i + k]);
          if (h < 0) throw std::invalid_argument("truncated unicode escape");
          v = v * 16 + static_cast<char32_t>(h);
        }
        if (v > 0x10FFFF) throw std::invalid_argument("illegal unicode character");
        i += len;
        append_utf8(out, v);
        break;
      }
      case 'N': {
        if (sv.bytes) {
          out.push_back('\\');
          out.push_back('N');
          break;
        }
        auto close = body.find('}', i);
        if (i >= body.size() || body[i] != '{' || close == std::string_view::npos)
          throw std::invalid_argument("malformed \\N escape");
        out += "\\N";
        out.append(body.substr(i, close + 1 - i));
        i = close + 1;
        sv.opaque = true;
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          int v = e - '0';
          for (int k = 0; k < 2 && i < body.size() && body[i] >= '0' && body[i] <= '7'; ++k, ++i) v = v * 8 + (body[i] - '0');
          if (sv.bytes) out.push_back(static_cast<char>(v & 0xFF));
          else append_utf8(out, static_cast<char32_t>(v));
        } else {
          out.push_back('\\');
          out.push_back(e);
        }
    }
  }
  return sv;
}

}  // namespace cellrw::syntax::detail
