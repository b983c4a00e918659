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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hhlab/convexity.hpp"

namespace hhlab {
namespace {

FuncDef builtin(std::string_view n) { return *find_builtin(n); }

TEST(Jensen, Examples) {
  Interval d(-2, 2);
  ConvexityReport sq = jensen_check(builtin("square"), d, 1000, 1, 1e-12);
  EXPECT_EQ(sq.verdict, Verdict::NoViolationFound);
  EXPECT_EQ(sq.pairs_tested, 1000u);
  EXPECT_TRUE(sq.exact);

  ConvexityReport neg = jensen_check(builtin("neg_square"), d, 1000, 1, 1e-12);
  ASSERT_EQ(neg.verdict, Verdict::Counterexample);
  ASSERT_TRUE(neg.witness);
  EXPECT_EQ(neg.witness->lambda, Rational(1, 2));
  EXPECT_GT(neg.witness->lhs.value, neg.witness->rhs.value + 1e-12);
  // Hand check at x = 0, y = 1.
  EXPECT_EQ(*builtin("neg_square").body().eval_exact(Rational(1, 2)), Rational(-1, 4));
  EXPECT_GT(Rational(-1, 4), (Rational(0) + Rational(-1)) / Rational(2));

  ConvexityReport aff = jensen_check(builtin("affine"), d, 1000, 1, 1e-12);
  EXPECT_EQ(aff.verdict, Verdict::NoViolationFound);
  EXPECT_THROW(jensen_check(builtin("square"), d, 0, 1, 1e-12), std::invalid_argument);
  EXPECT_THROW(Interval(1, 1), std::invalid_argument);
}

TEST(Jensen, FloatAffineEqualityIsNotAViolation) {
  // Transcendental-free but written so that float rounding is visible.
  FuncDef g = FuncDef::parse("g", "x/3 + 1/7", std::nullopt, Shape::Affine);
  FuncDef h("h", Expr::call(Fn::Exp, {Expr::literal(0)}) * g.body());  // float-only, same function
  EXPECT_FALSE(h.exact_capable());
  EXPECT_EQ(jensen_check(h, Interval(-5, 5), 2000, 3, 1e-12).verdict, Verdict::NoViolationFound);
}

TEST(KConvex, Examples) {
  Interval d(-2, 2);
  EXPECT_EQ(k_convex_check(builtin("square"), d, 1000, 7, 2, 1e-12).verdict, Verdict::NoViolationFound);
  ConvexityReport s = k_convex_check(builtin("sin"), Interval(0, Rational::from_double(2 * std::numbers::pi)), 1000, 5,
                                     2, 1e-12);
  ASSERT_EQ(s.verdict, Verdict::Counterexample);
  EXPECT_GT(s.witness->lambda, Rational(0));
  EXPECT_LT(s.witness->lambda, Rational(1));
  EXPECT_THROW(k_convex_check(builtin("square"), d, 0, 5, 2, 1e-12), std::invalid_argument);
  EXPECT_THROW(k_convex_check(builtin("square"), d, 10, 1, 2, 1e-12), std::invalid_argument);
}

TEST(KConvex, HandPairOnSin) {
  // lambda = 1/2, x = pi/4, y = 3pi/4: sin(pi/2) = 1 > (sin(pi/4) + sin(3pi/4))/2.
  double lhs = std::sin(std::numbers::pi / 2), rhs = std::sin(std::numbers::pi / 4);
  EXPECT_GT(lhs, rhs + 0.2);
}

TEST(SecondDifference, Examples) {
  EXPECT_EQ(second_difference_check(builtin("quartic"), uniform(-1, 1, 64), 1e-12).verdict, Verdict::NoViolationFound);
  ConvexityReport s = second_difference_check(builtin("sin"), uniform(0, 3, 64), 1e-12);
  ASSERT_EQ(s.verdict, Verdict::Counterexample);
  Rational mid = s.witness->lambda * s.witness->x + (Rational(1) - s.witness->lambda) * s.witness->y;
  EXPECT_GT(mid, Rational(0));
  EXPECT_LT(mid.to_double(), std::numbers::pi);
  EXPECT_THROW(second_difference_check(builtin("square"), uniform(0, 1, 1), 1e-12), std::invalid_argument);
  // Nonuniform grid: the witness compares 2 f(t_i) against twice the chord value.
  ConvexityReport n = second_difference_check(builtin("neg_square"), KPartition(0, 1, {0, Rational(1, 4), 1}), 0);
  ASSERT_EQ(n.verdict, Verdict::Counterexample);
  EXPECT_EQ(n.witness->lambda, Rational(3, 4));
  EXPECT_EQ(*n.witness->lhs.exact, Rational(-1, 8));
  EXPECT_EQ(*n.witness->rhs.exact, Rational(-1, 2));
}

TEST(ClassifyShape, Suite) {
  Interval d(-1, 1);
  EXPECT_EQ(classify_shape(builtin("square"), d), Shape::Convex);
  EXPECT_EQ(classify_shape(builtin("exp"), d), Shape::Convex);
  EXPECT_EQ(classify_shape(builtin("neg_square"), d), Shape::Concave);
  EXPECT_EQ(classify_shape(builtin("affine"), d), Shape::Affine);
  EXPECT_EQ(classify_shape(builtin("sin"), Interval(-3, 3)), Shape::Unknown);
  EXPECT_EQ(classify_shape(builtin("sin"), Interval(-3, 0)), Shape::Convex);
}

TEST(SupportLine, Examples) {
  SupportLine s = support_line(builtin("square"), 1.0);
  EXPECT_NEAR(s.slope, 2.0, 1e-8);
  EXPECT_NEAR(s.intercept, -1.0, 1e-8);
  SupportLine a = support_line(builtin("abs"), 0.0);
  EXPECT_NEAR(a.d_minus, -1.0, 1e-12);
  EXPECT_NEAR(a.d_plus, 1.0, 1e-12);
  EXPECT_NEAR(a.slope, 0.0, 1e-12);
  EXPECT_NEAR(a.intercept, 0.0, 1e-12);
  EXPECT_THROW(support_line(builtin("neg_square"), 0.0), NoSupportError);
  SupportLine e = support_line(builtin("exp"), 0.5);
  EXPECT_NEAR(e.slope, std::exp(0.5), 1e-7);
}

TEST(SupportLine, PropertyOnConvexSuite) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const char* n : {"square", "quartic", "abs", "exp", "relu"}) {
    FuncDef f = builtin(n);
    for (int i = 0; i < 20; ++i) {
      double z = u(rng);
      SupportLine s = support_line(f, z);
      EXPECT_NEAR(s(z), f(z), 1e-8) << n;
      for (int k = 0; k <= 1000; ++k) {
        double t = z - 1 + 2.0 * k / 1000;
        EXPECT_LE(s(t), f(t) + 1e-8 * std::max(1.0, std::abs(f(t)))) << n << " z=" << z << " t=" << t;
      }
    }
  }
}

TEST(FindViolation, Examples) {
  auto w = find_violation(builtin("neg_square"), *builtin("neg_square").primitive(), Interval(0, 1), 100, 1, 1e-12);
  ASSERT_TRUE(w);
  EXPECT_EQ(w->side, HHSide::Left);
  EXPECT_GT(w->lhs.value, w->rhs.value);

  Primitive sq = *builtin("square").primitive();
  EXPECT_FALSE(find_violation(builtin("square"), sq, Interval(-1, 1), 5000, 1, 1e-12));

  FuncDef perturbed = FuncDef::parse("P", "x^3/3 + x*(1/100)");
  auto p = find_violation(builtin("square"), perturbed, Interval(-1, 1), 5000, 1, 1e-12);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->side, HHSide::Right);
  EXPECT_THROW(find_violation(builtin("square"), sq, Interval(-1, 1), 0, 1, 1e-12), std::invalid_argument);
}

TEST(FindViolation, HandPairAtEndpoints) {
  // x = 0, y = 1: midpoint -1/4 against quotient -1/3.
  HHPairResult r = hh_check_pair(builtin("neg_square"), *builtin("neg_square").primitive(), 0, 1, 1e-12);
  EXPECT_EQ(*r.midpoint_value.exact, Rational(-1, 4));
  EXPECT_EQ(*r.difference_quotient.exact, Rational(-1, 3));
  EXPECT_FALSE(r.left_holds);
}

TEST(Property, ConvexSuitePassesAllChecks) {
  Interval d(-1, 1);
  for (const FuncDef& f : builtin_suite()) {
    if (f.declared_shape() != Shape::Convex) continue;
    EXPECT_EQ(jensen_check(f, d, 2000, 5, 1e-12).verdict, Verdict::NoViolationFound) << f.name();
    EXPECT_EQ(k_convex_check(f, d, 2000, 12, 5, 1e-12).verdict, Verdict::NoViolationFound) << f.name();
    EXPECT_EQ(second_difference_check(f, uniform(-1, 1, 256), 1e-12).verdict, Verdict::NoViolationFound) << f.name();
    EXPECT_EQ(second_difference_check(f, farey(-1, 1, 20), 1e-12).verdict, Verdict::NoViolationFound) << f.name();
  }
}

TEST(Property, WitnessesSurviveRecheck) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    std::uint64_t seed = rng();
    for (const char* n : {"neg_square", "sin"}) {
      FuncDef f = builtin(n);
      auto w = find_violation(f, *f.primitive(), Interval(0, 3), 200, seed, 1e-9);
      ASSERT_TRUE(w) << n;
      // Doubled precision at a tenth of the tolerance.
      HHPairResult again = hh_check_pair_float<long double>(f, *f.primitive(), w->pair.x, w->pair.y, 1e-10);
      EXPECT_FALSE(again.holds()) << n;
      ConvexityReport c = jensen_check(f, Interval(0, 3), 200, seed, 1e-9);
      ASSERT_EQ(c.verdict, Verdict::Counterexample);
      ConvexityWitness cw;
      EXPECT_TRUE(detail::convex_violated_float<long double>(f, {c.witness->x, c.witness->y, c.witness->lambda},
                                                             1e-10, &cw));
    }
  }
}

TEST(Property, SamplerIsDeterministicAndInterior) {
  Interval d(Rational(-3, 2), 2);
  PairSampler s(d, 99);
  auto a = s.draw(3000, 9), b = PairSampler(d, 99).draw(3000, 9);
  ASSERT_EQ(a.size(), 3000u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_EQ(a[i].lambda, b[i].lambda);
    EXPECT_LT(d.lo, a[i].x);
    EXPECT_LT(a[i].y, d.hi);
    EXPECT_NE(a[i].x, a[i].y);
    EXPECT_LE(a[i].lambda.denominator(), 9);
  }
  auto c = PairSampler(d, 100).draw(3000, 9);
  EXPECT_FALSE(std::equal(a.begin(), a.end(), c.begin(), [](const auto& p, const auto& q) { return p.x == q.x; }));
}

}  // namespace
}  // namespace hhlab
