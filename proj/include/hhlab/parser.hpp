/*
   Copyright 2026 The hh-lab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

/**
 * @file parser.hpp
 * @brief Recursive-descent parser for the function-definition language.
 *
 *   expr   := term (("+"|"-") term)*
 *   term   := factor (("*"|"/") factor)*
 *   factor := "-" factor | atom ("^" int)?
 *   atom   := number | "x" | ident "(" expr ("," expr)* ")" | "(" expr ")"
 *   number := int ("/" posint)? | decimal
 *   ident  := exp | log | sin | cos | abs | max | min
 *
 * Whitespace is ignored between tokens. Literals are exact: "0.25" is 1/4 and
 * "3/4" is a single rational literal. Exponents are capped at
 * Expr::kMaxExponent.
 */

#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "expr.hpp"
#include "rational.hpp"

namespace hhlab {

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse_all() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail({"+", "-", "*", "/", "^", "end of input"}, "unexpected trailing input");
    return e;
  }

 private:
  static constexpr int kMaxDepth = 256;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool is_digit(std::size_t i) const { return i < s_.size() && s_[i] >= '0' && s_[i] <= '9'; }

  [[noreturn]] void fail(std::set<std::string> expected, const std::string& what) {
    throw ParseError(pos_, std::move(expected), what);
  }
  [[noreturn]] void fail_atom() { fail({"number", "x", "function", "(", "-"}, "expected an operand"); }

  std::string_view digits() {
    std::size_t start = pos_;
    while (is_digit(pos_)) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  Expr expr() {
    if (++depth_ > kMaxDepth) fail({}, "expression nested too deeply");
    Expr lhs = term();
    while (true) {
      if (peek('+')) {
        ++pos_;
        lhs = lhs + term();
      } else if (peek('-')) {
        ++pos_;
        lhs = lhs - term();
      } else {
        break;
      }
    }
    --depth_;
    return lhs;
  }

  Expr term() {
    Expr lhs = factor();
    while (true) {
      if (peek('*')) {
        ++pos_;
        lhs = lhs * factor();
      } else if (peek('/')) {
        ++pos_;
        lhs = lhs / factor();
      } else {
        break;
      }
    }
    return lhs;
  }

  Expr factor() {
    if (peek('-')) {
      if (++depth_ > kMaxDepth) fail({}, "expression nested too deeply");
      ++pos_;
      Expr inner = factor();
      --depth_;
      return -inner;
    }
    Expr base = atom();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t at = pos_;
      auto d = digits();
      if (d.empty()) fail({"integer"}, "exponent must be a non-negative integer literal");
      if (d.size() > 6 || std::stol(std::string(d)) > Expr::kMaxExponent) {
        pos_ = at;
        fail({}, "exponent exceeds " + std::to_string(Expr::kMaxExponent));
      }
      return Expr::pow(std::move(base), std::stol(std::string(d)));
    }
    return base;
  }

  Expr atom() {
    skip_ws();
    if (pos_ >= s_.size()) fail_atom();
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!peek(')')) fail({")"}, "unbalanced parenthesis");
      ++pos_;
      return inner;
    }
    if (is_digit(pos_)) return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail_atom();
  }

  Expr number() {
    std::string_view whole = digits();
    if (pos_ < s_.size() && s_[pos_] == '.' && is_digit(pos_ + 1)) {
      ++pos_;
      std::string_view frac = digits();
      return Expr::literal(Rational::parse(std::string(whole) + "." + std::string(frac)));
    }
    // int "/" posint fuses into one literal.
    std::size_t save = pos_;
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '/') {
      ++pos_;
      skip_ws();
      std::string_view den = digits();
      if (!den.empty() && den.find_first_not_of('0') != std::string_view::npos)
        return Expr::literal(Rational::normalize(BigInt(std::string(whole)), BigInt(std::string(den))));
    }
    pos_ = save;
    return Expr::literal(Rational(BigInt(std::string(whole))));
  }

  Expr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string_view name = s_.substr(start, pos_ - start);
    if (name == "x") return Expr::var();
    auto fn = fn_from_name(name);
    if (!fn) {
      pos_ = start;
      fail({"x", "exp", "log", "sin", "cos", "abs", "max", "min"}, "unknown identifier '" + std::string(name) + "'");
    }
    if (!peek('(')) fail({"("}, "expected '(' after function name");
    ++pos_;
    std::vector<Expr> args{expr()};
    while (peek(',')) {
      ++pos_;
      args.push_back(expr());
    }
    if (!peek(')')) fail({",", ")"}, "unterminated argument list");
    ++pos_;
    bool variadic = *fn == Fn::Max || *fn == Fn::Min;
    if (variadic ? args.size() < 2 : args.size() != 1) {
      pos_ = start;
      fail({}, std::string(name) + (variadic ? " takes at least two arguments" : " takes exactly one argument"));
    }
    return Expr::call(*fn, std::move(args));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace detail

/// Parses text into an Expr. Throws ParseError with the byte offset of the
/// offending token and the set of tokens that would have been accepted.
inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

}  // namespace hhlab
