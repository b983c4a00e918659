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

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "expr.hpp"
#include "parser.hpp"
#include "rational.hpp"

namespace hhlab {

enum class Shape { Convex, Concave, Affine, Unknown };

inline std::string_view shape_name(Shape s) {
  switch (s) {
    case Shape::Convex: return "convex";
    case Shape::Concave: return "concave";
    case Shape::Affine: return "affine";
    case Shape::Unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<Shape> shape_from_name(std::string_view name) {
  for (Shape s : {Shape::Convex, Shape::Concave, Shape::Affine, Shape::Unknown})
    if (shape_name(s) == name) return s;
  return std::nullopt;
}

/// A value that is always available in floating point and, when every step
/// that produced it stayed in the rationals, also exactly.
struct Number {
  double value = 0.0;
  std::optional<Rational> exact;

  static Number of(Rational r) {
    double v = r.to_double();
    return {v, std::move(r)};
  }
  static Number approx(double v) { return {v, std::nullopt}; }

  bool is_exact() const { return exact.has_value(); }
  std::string str() const { return exact ? exact->str() : std::to_string(value); }
};

inline Number operator+(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of(*a.exact + *b.exact);
  return Number::approx(a.value + b.value);
}
inline Number operator-(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of(*a.exact - *b.exact);
  return Number::approx(a.value - b.value);
}
inline Number operator*(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of(*a.exact * *b.exact);
  return Number::approx(a.value * b.value);
}
inline Number operator/(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of(*a.exact / *b.exact);
  return Number::approx(a.value / b.value);
}

/// a <= b + tol, compared exactly when both sides are exact.
inline bool leq_with_tol(const Number& a, const Number& b, double tol) {
  if (a.exact && b.exact) return *a.exact <= *b.exact + Rational::from_double(tol);
  return a.value <= b.value + tol;
}

/// Open interval of definition; a missing endpoint is infinite.
struct Domain {
  std::optional<Rational> lo;
  std::optional<Rational> hi;

  static Domain real_line() { return {}; }

  bool contains(const Rational& x) const { return (!lo || *lo < x) && (!hi || x < *hi); }
  bool contains(double x) const {
    return (!lo || lo->to_double() < x) && (!hi || x < hi->to_double());
  }
  /// [a, b] lies in the closure of the domain.
  bool covers(const Rational& a, const Rational& b) const { return (!lo || *lo <= a) && (!hi || b <= *hi); }

  std::string str() const {
    return "(" + (lo ? lo->str() : std::string("-inf")) + ", " + (hi ? hi->str() : std::string("inf")) + ")";
  }
};

/// Finite interval with lo < hi, used for scans and integration ranges.
struct Interval {
  Rational lo;
  Rational hi;

  Interval(Rational a, Rational b) : lo(std::move(a)), hi(std::move(b)) {
    if (!(lo < hi)) throw std::invalid_argument("empty interval [" + lo.str() + ", " + hi.str() + "]");
  }
  Rational width() const { return hi - lo; }
};

/// A named function with an optional declared antiderivative. The declared
/// shape is metadata only; consumers that depend on it verify it.
class FuncDef {
 public:
  FuncDef(std::string name, Expr body, std::optional<Expr> antiderivative = std::nullopt,
          Shape declared_shape = Shape::Unknown, Domain domain = Domain::real_line())
      : name_(std::move(name)),
        body_(std::move(body)),
        antiderivative_(std::move(antiderivative)),
        shape_(declared_shape),
        domain_(std::move(domain)),
        exact_capable_(body_.rational_closed()),
        affine_(affine_form(body_)) {}

  static FuncDef parse(std::string name, std::string_view body, std::optional<std::string_view> antiderivative = {},
                       Shape declared_shape = Shape::Unknown, Domain domain = Domain::real_line()) {
    std::optional<Expr> anti;
    if (antiderivative) anti = hhlab::parse(*antiderivative);
    return FuncDef(std::move(name), hhlab::parse(body), std::move(anti), declared_shape, std::move(domain));
  }

  const std::string& name() const { return name_; }
  const Expr& body() const { return body_; }
  const std::optional<Expr>& antiderivative() const { return antiderivative_; }
  Shape declared_shape() const { return shape_; }
  const Domain& domain() const { return domain_; }
  std::string text() const { return to_string(body_); }

  /// Every node is rational-closed, so exact evaluation never gives up.
  bool exact_capable() const { return exact_capable_; }
  /// Present when the body is structurally a polynomial of degree <= 1.
  const std::optional<AffineForm>& affine() const { return affine_; }

  double operator()(double x) const { return body_.eval(x); }
  template <std::floating_point T>
  T eval(T x) const {
    return body_.eval(x);
  }

  /// Exact value when requested and possible, float otherwise.
  Number evaluate(const Rational& x, bool exact) const {
    if (exact && exact_capable_) return Number::of(*body_.eval_exact(x));
    return Number::approx(body_.eval(x.to_double()));
  }

  /// The declared antiderivative as a function in its own right.
  std::optional<FuncDef> primitive() const {
    if (!antiderivative_) return std::nullopt;
    return FuncDef(name_ + "_primitive", *antiderivative_, std::nullopt, Shape::Unknown, domain_);
  }

  FuncDef with_shape(Shape s) const {
    FuncDef f = *this;
    f.shape_ = s;
    return f;
  }

  /// -f, with the antiderivative negated and convex/concave swapped.
  FuncDef negated() const {
    std::optional<Expr> anti;
    if (antiderivative_) anti = -*antiderivative_;
    Shape s = shape_ == Shape::Convex ? Shape::Concave : shape_ == Shape::Concave ? Shape::Convex : shape_;
    return FuncDef("neg_" + name_, -body_, std::move(anti), s, domain_);
  }

 private:
  std::string name_;
  Expr body_;
  std::optional<Expr> antiderivative_;
  Shape shape_;
  Domain domain_;
  bool exact_capable_;
  std::optional<AffineForm> affine_;
};

/// Built-in test functions with known antiderivatives.
inline const std::vector<FuncDef>& builtin_suite() {
  static const std::vector<FuncDef> suite = [] {
    std::vector<FuncDef> v;
    v.push_back(FuncDef::parse("square", "x^2", "x^3/3", Shape::Convex));
    v.push_back(FuncDef::parse("quartic", "x^4", "x^5/5", Shape::Convex));
    v.push_back(FuncDef::parse("abs", "abs(x)", "x*abs(x)/2", Shape::Convex));
    v.push_back(FuncDef::parse("exp", "exp(x)", "exp(x)", Shape::Convex));
    v.push_back(FuncDef::parse("relu", "max(x, 0)", "max(x, 0)^2/2", Shape::Convex));
    v.push_back(FuncDef::parse("neg_square", "-x^2", "-x^3/3", Shape::Concave));
    v.push_back(FuncDef::parse("sin", "sin(x)", "-cos(x)", Shape::Unknown));
    v.push_back(FuncDef::parse("affine", "2*x + 3", "x^2 + 3*x", Shape::Affine));
    return v;
  }();
  return suite;
}

inline std::optional<FuncDef> find_builtin(std::string_view name) {
  for (const auto& f : builtin_suite())
    if (f.name() == name) return f;
  return std::nullopt;
}

}  // namespace hhlab
