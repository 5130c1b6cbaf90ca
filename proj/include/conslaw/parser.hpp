#pragma once

#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "conslaw/expr.hpp"

namespace conslaw {

/// Syntax error with the byte offset into the input.
class parse_error : public std::runtime_error {
 public:
  parse_error(const std::string& what, std::size_t pos)
      : std::runtime_error(what + " at position " + std::to_string(pos)), pos_(pos) {}
  std::size_t position() const { return pos_; }

 private:
  std::size_t pos_;
};

/// Recursive-descent parser for the flux spec grammar:
///
///   fluxspec := '[' expr (',' expr)* ']'
///   expr     := term (('+'|'-') term)*
///   term     := unary (('*'|'/') unary)*
///   unary    := '-' unary | power
///   power    := atom ('^' exponent)?      exponent is a numeric literal,
///                                         optionally parenthesized/signed
///   atom     := number | 'u' | 'pi' | '(' expr ')' | func '(' ... ')'
///   func     := sin | cos | exp | abspow | flatbump | pow
///
/// abspow(x, q) is |x|^q and flatbump(x) is exp(-1/x^2) with value 0 at
/// x = 0.  Integer exponents map to exact integer powers.
class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse_expression() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return e;
  }

  std::vector<Expr> parse_component_list() {
    skip_ws();
    expect('[');
    std::vector<Expr> comps;
    comps.push_back(parse_sum());
    skip_ws();
    while (peek() == ',') {
      ++pos_;
      comps.push_back(parse_sum());
      skip_ws();
    }
    expect(']');
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected trailing input");
    return comps;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(msg, pos_); }

  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr parse_sum() {
    Expr e = parse_term();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '+') {
        ++pos_;
        e = e + parse_term();
      } else if (c == '-') {
        ++pos_;
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c == '*') {
        ++pos_;
        e = e * parse_unary();
      } else if (c == '/') {
        ++pos_;
        e = e / parse_unary();
      } else {
        return e;
      }
    }
  }

  Expr parse_unary() {
    skip_ws();
    if (peek() == '-') {
      ++pos_;
      return -parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    skip_ws();
    if (peek() != '^') return base;
    ++pos_;
    double r = parse_exponent_literal();
    double rounded = std::round(r);
    if (std::abs(r - rounded) < 1e-12 && std::abs(rounded) <= 1e6)
      return Expr::pow(base, static_cast<int>(rounded));
    return Expr::pow(base, r);
  }

  // Exponents must be numeric literals; a general expression exponent has
  // no node in the tree language.
  double parse_exponent_literal() {
    skip_ws();
    bool paren = false;
    if (peek() == '(') {
      paren = true;
      ++pos_;
      skip_ws();
    }
    double sign = 1.0;
    if (peek() == '-') {
      sign = -1.0;
      ++pos_;
      skip_ws();
    }
    if (!std::isdigit(static_cast<unsigned char>(peek())) && peek() != '.')
      fail("exponent must be a numeric literal");
    double v = sign * parse_number();
    if (paren) expect(')');
    return v;
  }

  double parse_number() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        ++pos_;
      } else if ((c == 'e' || c == 'E') && pos_ + 1 < src_.size() &&
                 (std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])) ||
                  ((src_[pos_ + 1] == '+' || src_[pos_ + 1] == '-') && pos_ + 2 < src_.size() &&
                   std::isdigit(static_cast<unsigned char>(src_[pos_ + 2]))))) {
        pos_ += 2;
      } else {
        break;
      }
    }
    if (start == pos_) fail("expected number");
    try {
      return std::stod(std::string(src_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number");
    }
  }

  std::string parse_ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    return std::string(src_.substr(start, pos_ - start));
  }

  Expr parse_atom() {
    skip_ws();
    char c = peek();
    if (c == '\0') fail("unexpected end of input");
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return Expr::constant(parse_number());
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t ident_pos = pos_;
      std::string name = parse_ident();
      if (name == "u") return Expr::var();
      if (name == "pi") return Expr::constant(3.14159265358979323846);
      skip_ws();
      if (peek() != '(') {
        pos_ = ident_pos;
        fail("unknown identifier '" + name + "'");
      }
      ++pos_;
      if (name == "sin" || name == "cos" || name == "exp" || name == "flatbump") {
        Expr arg = parse_sum();
        expect(')');
        if (name == "sin") return Expr::sin(arg);
        if (name == "cos") return Expr::cos(arg);
        if (name == "exp") return Expr::exp(arg);
        return Expr::flat_bump(arg);
      }
      if (name == "abspow" || name == "pow") {
        Expr arg = parse_sum();
        expect(',');
        double q = parse_exponent_literal();
        expect(')');
        if (name == "abspow") {
          if (q <= 0.0) {
            pos_ = ident_pos;
            fail("abspow exponent must be positive");
          }
          return Expr::abs_pow(arg, q);
        }
        double rounded = std::round(q);
        if (std::abs(q - rounded) < 1e-12) return Expr::pow(arg, static_cast<int>(rounded));
        return Expr::pow(arg, q);
      }
      pos_ = ident_pos;
      fail("unsupported function name '" + name + "'");
    }
    fail("unexpected character");
  }
};

inline Expr parse_expr(std::string_view src) { return Parser(src).parse_expression(); }

}  // namespace conslaw
