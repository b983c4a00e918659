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
 * @file expr.hpp
 * @brief Expression trees for functions of one real variable x.
 *
 * Nodes are immutable and shared; copying an Expr is cheap. Three evaluators
 * are provided: floating point (templated on the scalar type so witnesses can
 * be re-checked at higher precision), exact rational (returns std::nullopt
 * at the first transcendental node) and a natural interval extension used as
 * a bound oracle.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace hhlab {

enum class Op { Literal, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Fn { Exp, Log, Sin, Cos, Abs, Max, Min };

inline std::string_view fn_name(Fn fn) {
  switch (fn) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Abs: return "abs";
    case Fn::Max: return "max";
    case Fn::Min: return "min";
  }
  return "?";
}

inline std::optional<Fn> fn_from_name(std::string_view name) {
  static constexpr std::array<Fn, 7> all{Fn::Exp, Fn::Log, Fn::Sin, Fn::Cos, Fn::Abs, Fn::Max, Fn::Min};
  for (Fn fn : all)
    if (fn_name(fn) == name) return fn;
  return std::nullopt;
}

/// exp, log, sin and cos leave the rationals.
inline bool is_transcendental(Fn fn) {
  return fn == Fn::Exp || fn == Fn::Log || fn == Fn::Sin || fn == Fn::Cos;
}

class Expr {
 public:
  static constexpr long kMaxExponent = 1024;

  static Expr literal(Rational value) {
    auto n = std::make_shared<Node>(Op::Literal);
    n->value = std::move(value);
    n->value_d = n->value.to_double();
    return Expr(std::move(n));
  }
  static Expr var() { return Expr(std::make_shared<Node>(Op::Var)); }
  static Expr neg(Expr e) {
    auto n = std::make_shared<Node>(Op::Neg);
    n->args.push_back(std::move(e));
    return Expr(std::move(n));
  }
  static Expr binary(Op op, Expr lhs, Expr rhs) {
    if (op != Op::Add && op != Op::Sub && op != Op::Mul && op != Op::Div)
      throw std::invalid_argument("not a binary operator");
    auto n = std::make_shared<Node>(op);
    n->args.push_back(std::move(lhs));
    n->args.push_back(std::move(rhs));
    return Expr(std::move(n));
  }
  static Expr pow(Expr base, long exponent) {
    if (exponent < 0 || exponent > kMaxExponent)
      throw std::invalid_argument("exponent must be an integer in [0, " + std::to_string(kMaxExponent) + "]");
    auto n = std::make_shared<Node>(Op::Pow);
    n->exponent = exponent;
    n->args.push_back(std::move(base));
    return Expr(std::move(n));
  }
  static Expr call(Fn fn, std::vector<Expr> args) {
    bool variadic = fn == Fn::Max || fn == Fn::Min;
    if (variadic ? args.size() < 2 : args.size() != 1)
      throw std::invalid_argument(std::string("wrong number of arguments to ") + std::string(fn_name(fn)));
    auto n = std::make_shared<Node>(Op::Call);
    n->fn = fn;
    n->args = std::move(args);
    return Expr(std::move(n));
  }

  Op op() const { return node_->op; }
  const Rational& value() const { return node_->value; }
  long exponent() const { return node_->exponent; }
  Fn fn() const { return node_->fn; }
  const std::vector<Expr>& args() const { return node_->args; }
  const Expr& arg(std::size_t i) const { return node_->args.at(i); }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.op != y.op) return false;
    switch (x.op) {
      case Op::Literal: return x.value == y.value;
      case Op::Var: return true;
      case Op::Pow:
        if (x.exponent != y.exponent) return false;
        break;
      case Op::Call:
        if (x.fn != y.fn) return false;
        break;
      default: break;
    }
    return x.args == y.args;
  }

  /// Floating-point evaluation. Throws DomainError for log of a non-positive
  /// value, division by zero and non-finite results.
  template <std::floating_point T>
  T eval(T x) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::Literal:
        if constexpr (std::is_same_v<T, double>)
          return n.value_d;
        else
          return n.value.template to_float<T>();
      case Op::Var: return x;
      case Op::Neg: return -n.args[0].eval(x);
      case Op::Add: return n.args[0].eval(x) + n.args[1].eval(x);
      case Op::Sub: return n.args[0].eval(x) - n.args[1].eval(x);
      case Op::Mul: return n.args[0].eval(x) * n.args[1].eval(x);
      case Op::Div: {
        T num = n.args[0].eval(x);
        T den = n.args[1].eval(x);
        if (den == T(0)) throw DomainError("division by zero");
        return finite(num / den);
      }
      case Op::Pow: return finite(ipow(n.args[0].eval(x), n.exponent));
      case Op::Call: {
        T a = n.args[0].eval(x);
        switch (n.fn) {
          case Fn::Exp: return finite(std::exp(a));
          case Fn::Log:
            if (!(a > T(0))) throw DomainError("log of non-positive value");
            return std::log(a);
          case Fn::Sin: return std::sin(a);
          case Fn::Cos: return std::cos(a);
          case Fn::Abs: return std::abs(a);
          case Fn::Max:
            for (std::size_t i = 1; i < n.args.size(); ++i) a = std::max(a, n.args[i].eval(x));
            return a;
          case Fn::Min:
            for (std::size_t i = 1; i < n.args.size(); ++i) a = std::min(a, n.args[i].eval(x));
            return a;
        }
      }
    }
    throw std::logic_error("corrupt expression node");
  }

  /// Exact evaluation; std::nullopt means a transcendental node was reached.
  /// Division by zero throws ArithmeticError.
  std::optional<Rational> eval_exact(const Rational& x) const {
    const Node& n = *node_;
    switch (n.op) {
      case Op::Literal: return n.value;
      case Op::Var: return x;
      case Op::Neg: {
        auto a = n.args[0].eval_exact(x);
        if (!a) return std::nullopt;
        return -*a;
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        auto a = n.args[0].eval_exact(x);
        if (!a) return std::nullopt;
        auto b = n.args[1].eval_exact(x);
        if (!b) return std::nullopt;
        switch (n.op) {
          case Op::Add: return *a + *b;
          case Op::Sub: return *a - *b;
          case Op::Mul: return *a * *b;
          default: return *a / *b;
        }
      }
      case Op::Pow: {
        auto a = n.args[0].eval_exact(x);
        if (!a) return std::nullopt;
        return hhlab::pow(*a, n.exponent);
      }
      case Op::Call: {
        if (is_transcendental(n.fn)) return std::nullopt;
        auto a = n.args[0].eval_exact(x);
        if (!a) return std::nullopt;
        if (n.fn == Fn::Abs) return hhlab::abs(*a);
        for (std::size_t i = 1; i < n.args.size(); ++i) {
          auto b = n.args[i].eval_exact(x);
          if (!b) return std::nullopt;
          if (n.fn == Fn::Max ? *a < *b : *b < *a) a = std::move(b);
        }
        return a;
      }
    }
    throw std::logic_error("corrupt expression node");
  }

  /// True when the tree contains no transcendental call, i.e. eval_exact
  /// never returns std::nullopt.
  bool rational_closed() const {
    if (node_->op == Op::Call && is_transcendental(node_->fn)) return false;
    return std::all_of(node_->args.begin(), node_->args.end(), [](const Expr& e) { return e.rational_closed(); });
  }

 private:
  struct Node {
    explicit Node(Op o) : op(o) {}
    Op op;
    Rational value;
    double value_d = 0.0;
    long exponent = 0;
    Fn fn = Fn::Exp;
    std::vector<Expr> args;
  };

  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  template <typename T>
  static T ipow(T base, long e) {
    T result(1);
    while (e > 0) {
      if (e & 1) result *= base;
      base *= base;
      e >>= 1;
    }
    return result;
  }

  template <typename T>
  static T finite(T v) {
    if (!std::isfinite(v)) throw DomainError("non-finite value during evaluation");
    return v;
  }

  std::shared_ptr<const Node> node_;
};

inline Expr operator+(Expr a, Expr b) { return Expr::binary(Op::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::binary(Op::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::binary(Op::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::binary(Op::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::neg(std::move(a)); }

inline double eval_float(const Expr& e, double x) { return e.eval(x); }
inline std::optional<Rational> eval_rational(const Expr& e, const Rational& x) { return e.eval_exact(x); }

// ---------------------------------------------------------------------------
// Interval extension

struct Bounds {
  double lo;
  double hi;
};

namespace detail {

inline Bounds hull(std::initializer_list<double> vs) {
  return {std::min(vs), std::max(vs)};
}

// Range of sin over [lo, hi].
inline Bounds sin_bounds(double lo, double hi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (hi - lo >= two_pi) return {-1.0, 1.0};
  Bounds b = hull({std::sin(lo), std::sin(hi)});
  auto contains = [&](double phase) {
    double k = std::ceil((lo - phase) / two_pi);
    return phase + k * two_pi <= hi;
  };
  if (contains(std::numbers::pi / 2)) b.hi = 1.0;
  if (contains(-std::numbers::pi / 2)) b.lo = -1.0;
  return b;
}

}  // namespace detail

/// Natural interval extension of e over [lo, hi]. The enclosure is computed
/// in round-to-nearest arithmetic, so endpoints are accurate to a few ulps
/// rather than rigorously outward rounded.
inline Bounds eval_bounds(const Expr& e, double lo, double hi) {
  switch (e.op()) {
    case Op::Literal: {
      double v = e.value().to_double();
      return {v, v};
    }
    case Op::Var: return {lo, hi};
    case Op::Neg: {
      Bounds a = eval_bounds(e.arg(0), lo, hi);
      return {-a.hi, -a.lo};
    }
    case Op::Add: {
      Bounds a = eval_bounds(e.arg(0), lo, hi), b = eval_bounds(e.arg(1), lo, hi);
      return {a.lo + b.lo, a.hi + b.hi};
    }
    case Op::Sub: {
      Bounds a = eval_bounds(e.arg(0), lo, hi), b = eval_bounds(e.arg(1), lo, hi);
      return {a.lo - b.hi, a.hi - b.lo};
    }
    case Op::Mul: {
      Bounds a = eval_bounds(e.arg(0), lo, hi), b = eval_bounds(e.arg(1), lo, hi);
      return detail::hull({a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi});
    }
    case Op::Div: {
      Bounds a = eval_bounds(e.arg(0), lo, hi), b = eval_bounds(e.arg(1), lo, hi);
      if (b.lo <= 0.0 && b.hi >= 0.0) throw DomainError("divisor interval contains zero");
      return detail::hull({a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi});
    }
    case Op::Pow: {
      Bounds a = eval_bounds(e.arg(0), lo, hi);
      long k = e.exponent();
      double pl = std::pow(a.lo, static_cast<double>(k));
      double ph = std::pow(a.hi, static_cast<double>(k));
      if (k % 2 == 1) return {pl, ph};
      if (a.lo <= 0.0 && a.hi >= 0.0) return {k == 0 ? 1.0 : 0.0, std::max(pl, ph)};
      return detail::hull({pl, ph});
    }
    case Op::Call: {
      Bounds a = eval_bounds(e.arg(0), lo, hi);
      switch (e.fn()) {
        case Fn::Exp: return {std::exp(a.lo), std::exp(a.hi)};
        case Fn::Log:
          if (!(a.lo > 0.0)) throw DomainError("log of interval reaching non-positive values");
          return {std::log(a.lo), std::log(a.hi)};
        case Fn::Sin: return detail::sin_bounds(a.lo, a.hi);
        case Fn::Cos: return detail::sin_bounds(a.lo + std::numbers::pi / 2, a.hi + std::numbers::pi / 2);
        case Fn::Abs:
          if (a.lo >= 0.0) return a;
          if (a.hi <= 0.0) return {-a.hi, -a.lo};
          return {0.0, std::max(-a.lo, a.hi)};
        case Fn::Max:
        case Fn::Min:
          for (std::size_t i = 1; i < e.args().size(); ++i) {
            Bounds b = eval_bounds(e.arg(i), lo, hi);
            if (e.fn() == Fn::Max)
              a = {std::max(a.lo, b.lo), std::max(a.hi, b.hi)};
            else
              a = {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
          }
          return a;
      }
    }
  }
  throw std::logic_error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Polynomial structure

/// Coefficients c_0..c_d when e is a polynomial in x with rational
/// coefficients built from literals, x, +, -, *, division by a constant and
/// integer powers. Returns std::nullopt for anything else or when the degree
/// would exceed max_degree.
inline std::optional<std::vector<Rational>> polynomial_coefficients(const Expr& e, std::size_t max_degree = 64) {
  using Poly = std::vector<Rational>;
  auto trim = [](Poly p) {
    while (p.size() > 1 && p.back().is_zero()) p.pop_back();
    return p;
  };
  auto mul = [&](const Poly& a, const Poly& b) -> std::optional<Poly> {
    if (a.size() + b.size() - 2 > max_degree) return std::nullopt;
    Poly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return trim(std::move(r));
  };
  switch (e.op()) {
    case Op::Literal: return Poly{e.value()};
    case Op::Var: return Poly{Rational(0), Rational(1)};
    case Op::Neg: {
      auto a = polynomial_coefficients(e.arg(0), max_degree);
      if (!a) return std::nullopt;
      for (auto& c : *a) c = -c;
      return a;
    }
    case Op::Add:
    case Op::Sub: {
      auto a = polynomial_coefficients(e.arg(0), max_degree);
      auto b = polynomial_coefficients(e.arg(1), max_degree);
      if (!a || !b) return std::nullopt;
      Poly r(std::max(a->size(), b->size()));
      for (std::size_t i = 0; i < a->size(); ++i) r[i] += (*a)[i];
      for (std::size_t i = 0; i < b->size(); ++i) r[i] += e.op() == Op::Add ? (*b)[i] : -(*b)[i];
      return trim(std::move(r));
    }
    case Op::Mul: {
      auto a = polynomial_coefficients(e.arg(0), max_degree);
      auto b = polynomial_coefficients(e.arg(1), max_degree);
      if (!a || !b) return std::nullopt;
      return mul(*a, *b);
    }
    case Op::Div: {
      auto a = polynomial_coefficients(e.arg(0), max_degree);
      auto b = polynomial_coefficients(e.arg(1), max_degree);
      if (!a || !b || b->size() != 1 || (*b)[0].is_zero()) return std::nullopt;
      for (auto& c : *a) c /= (*b)[0];
      return a;
    }
    case Op::Pow: {
      auto base = polynomial_coefficients(e.arg(0), max_degree);
      if (!base) return std::nullopt;
      Poly r{Rational(1)};
      for (long i = 0; i < e.exponent(); ++i) {
        auto next = mul(r, *base);
        if (!next) return std::nullopt;
        r = std::move(*next);
      }
      return r;
    }
    case Op::Call: return std::nullopt;
  }
  return std::nullopt;
}

struct AffineForm {
  Rational slope;
  Rational intercept;
};

/// Slope and intercept when e is structurally a polynomial of degree <= 1.
inline std::optional<AffineForm> affine_form(const Expr& e) {
  auto p = polynomial_coefficients(e, 8);
  if (!p || p->size() > 2) return std::nullopt;
  return AffineForm{p->size() == 2 ? (*p)[1] : Rational(0), (*p)[0]};
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

// True when the printed form of e ends in a bare integer literal, which the
// lexer would fuse with a following "/digits" into a rational literal.
inline bool ends_with_integer_literal(const Expr& e) {
  switch (e.op()) {
    case Op::Literal: return e.value().is_integer();
    case Op::Neg:
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: return ends_with_integer_literal(e.args().back());
    default: return false;
  }
}

inline bool starts_with_integer_literal(const Expr& e) {
  switch (e.op()) {
    case Op::Literal: return e.value().is_integer() && e.value().sign() >= 0;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div:
    case Op::Pow: return starts_with_integer_literal(e.arg(0));
    default: return false;
  }
}

}  // namespace detail

/// Canonical text form; parse(to_string(e)) == e for every parsed e.
inline std::string to_string(const Expr& e) {
  auto wrap = [](const Expr& sub, bool paren) {
    std::string s = to_string(sub);
    return paren ? "(" + s + ")" : s;
  };
  switch (e.op()) {
    case Op::Literal: {
      const Rational& v = e.value();
      if (v.is_integer() && v.sign() >= 0) return v.numerator().str();
      return "(" + (v.sign() < 0 ? std::string("0-") : std::string()) + abs(v).str() + ")";
    }
    case Op::Var: return "x";
    case Op::Neg: return "-" + wrap(e.arg(0), detail::precedence(e.arg(0)) < 3);
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      int p = detail::precedence(e);
      const char* sym = e.op() == Op::Add ? " + " : e.op() == Op::Sub ? " - " : e.op() == Op::Mul ? "*" : "/";
      bool right_paren = detail::precedence(e.arg(1)) <= p;
      if (e.op() == Op::Div && detail::starts_with_integer_literal(e.arg(1)) &&
          detail::ends_with_integer_literal(e.arg(0)))
        right_paren = true;
      return wrap(e.arg(0), detail::precedence(e.arg(0)) < p) + sym + wrap(e.arg(1), right_paren);
    }
    case Op::Pow: return wrap(e.arg(0), detail::precedence(e.arg(0)) < 5) + "^" + std::to_string(e.exponent());
    case Op::Call: {
      std::string s(fn_name(e.fn()));
      s += "(";
      for (std::size_t i = 0; i < e.args().size(); ++i) {
        if (i) s += ", ";
        s += to_string(e.arg(i));
      }
      return s + ")";
    }
  }
  return "?";
}

}  // namespace hhlab
