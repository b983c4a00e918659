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
 * @file convexity.hpp
 * @brief Sample-based convexity checks, numeric support lines and the search
 * for pairs that break the Hermite-Hadamard system.
 *
 * Verdicts are empirical: NoViolationFound means no sampled pair broke the
 * inequality by more than tol. A Counterexample is reported only after the
 * witness survives a re-check at tol/10 (exactly, or in long double).
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "funcdef.hpp"
#include "pairs.hpp"
#include "parallel.hpp"
#include "partition.hpp"

namespace hhlab {

enum class Verdict { NoViolationFound, Counterexample };

inline std::string_view verdict_name(Verdict v) {
  return v == Verdict::Counterexample ? "counterexample" : "no_violation_found";
}

/// f(lambda*x + (1-lambda)*y) = lhs > rhs = lambda*f(x) + (1-lambda)*f(y) + tol.
struct ConvexityWitness {
  Rational x;
  Rational y;
  Rational lambda;
  Number lhs;
  Number rhs;
};

struct ConvexityReport {
  std::string check;  // "jensen", "k_convex" or "second_difference"
  Verdict verdict = Verdict::NoViolationFound;
  std::optional<ConvexityWitness> witness;
  std::size_t pairs_tested = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool exact = false;
};

namespace detail {

inline void require_covered(const FuncDef& f, const Interval& d) {
  if (!f.domain().covers(d.lo, d.hi))
    throw std::invalid_argument("interval [" + d.lo.str() + ", " + d.hi.str() + "] leaves the domain " +
                                f.domain().str() + " of '" + f.name() + "'");
}

template <std::floating_point T>
bool convex_violated_float(const FuncDef& f, const SamplePair& s, double tol, ConvexityWitness* w) {
  T lam = s.lambda.to_float<T>();
  Rational pt = s.lambda * s.x + (Rational(1) - s.lambda) * s.y;
  T lhs = f.eval<T>(pt.to_float<T>());
  T rhs = lam * f.eval<T>(s.x.to_float<T>()) + (1 - lam) * f.eval<T>(s.y.to_float<T>());
  if (w) *w = {s.x, s.y, s.lambda, Number::approx(static_cast<double>(lhs)), Number::approx(static_cast<double>(rhs))};
  return lhs > rhs + static_cast<T>(tol);
}

inline bool convex_violated_exact(const FuncDef& f, const SamplePair& s, double tol, ConvexityWitness* w) {
  Rational one_minus = Rational(1) - s.lambda;
  Rational lhs = *f.body().eval_exact(s.lambda * s.x + one_minus * s.y);
  Rational rhs = s.lambda * *f.body().eval_exact(s.x) + one_minus * *f.body().eval_exact(s.y);
  if (w) *w = {s.x, s.y, s.lambda, Number::of(lhs), Number::of(rhs)};
  return rhs + Rational::from_double(tol) < lhs;
}

// First sampled pair, in draw order, whose violation survives the re-check.
inline ConvexityReport scan_convexity(const FuncDef& f, const std::vector<SamplePair>& pairs,
                                      std::uint64_t seed, double tol, std::string check) {
  ConvexityReport rep;
  rep.check = std::move(check);
  rep.seed = seed;
  rep.tol = tol;
  rep.exact = f.exact_capable();
  rep.pairs_tested = pairs.size();
  std::vector<char> hit(pairs.size(), 0);
  parallel_for(pairs.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i)
      hit[i] = rep.exact ? convex_violated_exact(f, pairs[i], tol, nullptr)
                         : convex_violated_float<double>(f, pairs[i], tol, nullptr);
  }, 256);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!hit[i]) continue;
    ConvexityWitness w;
    bool confirmed = rep.exact ? convex_violated_exact(f, pairs[i], tol / 10, &w)
                               : convex_violated_float<long double>(f, pairs[i], tol / 10, &w);
    if (!confirmed) continue;
    if (!rep.exact) convex_violated_float<double>(f, pairs[i], tol, &w);
    rep.verdict = Verdict::Counterexample;
    rep.witness = std::move(w);
    rep.pairs_tested = i + 1;
    break;
  }
  return rep;
}

}  // namespace detail

/// Midpoint inequality f((x+y)/2) <= (f(x)+f(y))/2 on grid and seeded pairs.
inline ConvexityReport jensen_check(const FuncDef& f, const Interval& domain, std::size_t pairs, std::uint64_t seed,
                                    double tol) {
  if (pairs < 1) throw std::invalid_argument("jensen check needs at least one pair");
  detail::require_covered(f, domain);
  return detail::scan_convexity(f, PairSampler(domain, seed).draw(pairs), seed, tol, "jensen");
}

/// Convexity inequality with rational weights of denominator <= max_den.
inline ConvexityReport k_convex_check(const FuncDef& f, const Interval& domain, std::size_t pairs, long long max_den,
                                      std::uint64_t seed, double tol) {
  if (pairs < 1) throw std::invalid_argument("k-convexity check needs at least one pair");
  if (max_den < 2) throw std::invalid_argument("k-convexity check needs max_den >= 2");
  detail::require_covered(f, domain);
  return detail::scan_convexity(f, PairSampler(domain, seed).draw(pairs, max_den), seed, tol, "k_convex");
}

/// Discrete convexity on consecutive grid triples. With lambda the weight
/// placing t_i between t_{i-1} and t_{i+1}, the witness compares 2f(t_i)
/// against 2(lambda f(t_{i-1}) + (1-lambda) f(t_{i+1})); on uniform grids that
/// is the plain second difference f(t_{i-1}) - 2f(t_i) + f(t_{i+1}) >= -tol.
inline ConvexityReport second_difference_check(const FuncDef& f, const KPartition& grid, double tol) {
  if (grid.cells() < 2) throw std::invalid_argument("second differences need a grid of at least 3 points");
  if (!f.domain().covers(grid.a(), grid.b()))
    throw std::invalid_argument("grid leaves the domain of '" + f.name() + "'");
  ConvexityReport rep;
  rep.check = "second_difference";
  rep.tol = tol;
  rep.exact = f.exact_capable() && grid.field() == KField::Rationals;
  std::size_t n = grid.cells();
  rep.pairs_tested = n - 1;
  std::vector<double> v(n + 1);
  std::vector<Rational> q(rep.exact ? n + 1 : 0);
  detail::parallel_for(n + 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (rep.exact) {
        q[i] = *f.body().eval_exact(grid.point(i));
      } else {
        v[i] = f(grid.point_value(i));
      }
    }
  });
  Rational tol_q = rep.exact ? Rational::from_double(tol) : Rational(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (rep.exact) {
      Rational tl = grid.point(i - 1), tm = grid.point(i), tr = grid.point(i + 1);
      Rational lambda = (tr - tm) / (tr - tl);
      Rational lhs = Rational(2) * q[i];
      Rational rhs = Rational(2) * (lambda * q[i - 1] + (Rational(1) - lambda) * q[i + 1]);
      if (rhs + tol_q < lhs) {
        rep.verdict = Verdict::Counterexample;
        rep.witness = ConvexityWitness{tl, tr, lambda, Number::of(lhs), Number::of(rhs)};
        rep.pairs_tested = i;
        break;
      }
    } else {
      double tl = grid.point_value(i - 1), tm = grid.point_value(i), tr = grid.point_value(i + 1);
      double lambda = (tr - tm) / (tr - tl);
      double lhs = 2 * v[i], rhs = 2 * (lambda * v[i - 1] + (1 - lambda) * v[i + 1]);
      if (lhs > rhs + tol) {
        rep.verdict = Verdict::Counterexample;
        Rational lam_q = grid.field() == KField::Rationals
                             ? (grid.point(i + 1) - grid.point(i)) / (grid.point(i + 1) - grid.point(i - 1))
                             : Rational::from_double(lambda);
        rep.witness = ConvexityWitness{grid.point(i - 1), grid.point(i + 1), lam_q, Number::approx(lhs),
                                       Number::approx(rhs)};
        rep.pairs_tested = i;
        break;
      }
    }
  }
  return rep;
}

/// Empirical shape on an interval: structurally affine, else convex or
/// concave when both the grid second differences and a Jensen scan of f
/// (respectively -f) find nothing, else unknown.
inline Shape classify_shape(const FuncDef& f, const Interval& d, std::uint64_t seed = 1, double tol = 1e-12) {
  if (f.affine()) return Shape::Affine;
  auto passes = [&](const FuncDef& g) {
    return second_difference_check(g, uniform(d.lo, d.hi, 256), tol).verdict == Verdict::NoViolationFound &&
           jensen_check(g, d, 2000, seed, tol).verdict == Verdict::NoViolationFound;
  };
  if (passes(f)) return Shape::Convex;
  if (passes(f.negated())) return Shape::Concave;
  return Shape::Unknown;
}

// ---------------------------------------------------------------------------
// Support lines

struct SupportLine {
  double z = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double d_minus = 0.0;  // left derivative estimate
  double d_plus = 0.0;   // right derivative estimate

  double operator()(double x) const { return slope * x + intercept; }

  /// slope*x + intercept with the double coefficients converted exactly.
  FuncDef as_function(std::string name = "support") const {
    Expr e = Expr::literal(Rational::from_double(slope)) * Expr::var() + Expr::literal(Rational::from_double(intercept));
    return FuncDef(std::move(name), e, std::nullopt, Shape::Affine);
  }
};

namespace detail {

// One-sided derivative at z in direction dir (+1 or -1), by Richardson
// extrapolation of the forward quotient over h0, h0/2, ...
inline double one_sided_derivative(const FuncDef& f, double z, double h0, int dir, double tol) {
  constexpr int kLevels = 12;
  double fz = f(z);
  std::vector<double> prev, cur;
  double best = 0.0, last = 0.0;
  double h = h0;
  for (int k = 0; k < kLevels; ++k, h /= 2) {
    cur.assign(k + 1, 0.0);
    double zh = z + dir * h;
    cur[0] = (f(zh) - fz) / (zh - z);
    double pow2 = 1;
    for (int j = 1; j <= k; ++j) {
      pow2 *= 2;
      cur[j] = (pow2 * cur[j - 1] - prev[j - 1]) / (pow2 - 1);
    }
    best = cur[k];
    if (k > 0 && std::abs(best - last) <= tol * std::max(1.0, std::abs(best))) return best;
    last = best;
    prev.swap(cur);
  }
  return best;
}

}  // namespace detail

/// Line through (z, f(z)) with slope the midpoint of the one-sided derivative
/// estimates, verified to stay below f + tol on 1000 probes of [z-1, z+1]
/// within the domain. Raises NoSupportError when the probe check fails.
inline SupportLine support_line(const FuncDef& f, double z, double h0 = 1e-2, double tol = 1e-8) {
  if (!(h0 > 0)) throw std::invalid_argument("support line needs h0 > 0");
  if (!f.domain().contains(z)) throw std::invalid_argument("support point must lie inside the domain");
  double lo = z - 1, hi = z + 1;
  if (f.domain().lo) lo = std::max(lo, f.domain().lo->to_double());
  if (f.domain().hi) hi = std::min(hi, f.domain().hi->to_double());
  double reach = std::min(z - lo, hi - z);
  double h = std::min(h0, reach / 2);
  if (!(h > 0)) throw std::invalid_argument("support point is too close to the domain boundary");

  SupportLine s;
  s.z = z;
  s.d_minus = detail::one_sided_derivative(f, z, h, -1, tol);
  s.d_plus = detail::one_sided_derivative(f, z, h, +1, tol);
  s.slope = 0.5 * (s.d_minus + s.d_plus);
  double fz = f(z);
  s.intercept = fz - s.slope * z;

  constexpr int kProbes = 1000;
  double margin = (hi - lo) * 1e-9;
  for (int i = 0; i < kProbes; ++i) {
    double t = (lo + margin) + (hi - lo - 2 * margin) * i / (kProbes - 1);
    double ft = f(t);
    double slack = tol * std::max(1.0, std::abs(ft));
    if (s(t) > ft + slack)
      throw NoSupportError("no supporting line for '" + f.name() + "' at z = " + std::to_string(z) +
                           ": the line exceeds f at t = " + std::to_string(t));
  }
  return s;
}

// ---------------------------------------------------------------------------
// Violation search

enum class HHSide { Left, Right };

inline std::string_view side_name(HHSide s) { return s == HHSide::Left ? "left" : "right"; }

/// A pair that breaks the system: lhs > rhs + tol on the named side.
struct ViolationWitness {
  HHPairResult pair;
  HHSide side = HHSide::Left;
  Number lhs;
  Number rhs;
};

inline ViolationWitness make_witness(const HHPairResult& r) {
  if (!r.left_holds) return {r, HHSide::Left, r.midpoint_value, r.difference_quotient};
  return {r, HHSide::Right, r.difference_quotient, r.endpoint_average};
}

/// Re-evaluation at tol/10: exactly when possible, otherwise in long double.
inline bool revalidate(const FuncDef& f, const Primitive& F, const HHPairResult& r) {
  HHPairResult again = r.exact ? hh_check_pair(f, F, r.x, r.y, r.tol / 10)
                               : hh_check_pair_float<long double>(f, F, r.x, r.y, r.tol / 10);
  return !again.holds();
}

/// Searches grid and seeded pairs in order for the first one that violates the
/// system by more than tol and still does at tol/10.
inline std::optional<ViolationWitness> find_violation(const FuncDef& f, const Primitive& F, const Interval& domain,
                                                      std::size_t budget, std::uint64_t seed, double tol) {
  if (budget < 1) throw std::invalid_argument("violation search needs a budget of at least one pair");
  detail::require_covered(f, domain);
  PairSampler sampler(domain, seed);
  std::vector<SamplePair> pairs = F.is_table() ? sampler.draw_from(F.knots(), budget) : sampler.draw(budget);
  // Fixed-size batches keep the reported witness the first in draw order.
  constexpr std::size_t kBatch = 1024;
  for (std::size_t start = 0; start < pairs.size(); start += kBatch) {
    std::size_t stop = std::min(pairs.size(), start + kBatch);
    std::vector<std::optional<HHPairResult>> res(stop - start);
    detail::parallel_for(stop - start, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        res[i] = hh_check_pair(f, F, pairs[start + i].x, pairs[start + i].y, tol);
    }, 256);
    for (auto& r : res)
      if (!r->holds() && revalidate(f, F, *r)) return make_witness(*r);
  }
  return std::nullopt;
}

}  // namespace hhlab
