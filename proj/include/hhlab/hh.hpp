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
 * @file hh.hpp
 * @brief The Hermite-Hadamard engine.
 *
 * For convex f with primitive F every pair x != y satisfies
 *
 *     f((x+y)/2) <= (F(y) - F(x)) / (y - x) <= (f(x) + f(y)) / 2,
 *
 * and conversely. This header scans that system over pairs, sums it over
 * refining partitions (the cell quotients telescope to F(y) - F(x)), checks
 * F' = f through one-sided quotients and rebuilds F from f by integration.
 * An inequality fails only when it is broken by more than tol, so the affine
 * equality case never counts as a violation.
 */

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "convexity.hpp"
#include "kriemann.hpp"
#include "pairs.hpp"
#include "parallel.hpp"

namespace hhlab {

struct HHScanReport {
  std::size_t pairs_tested = 0;
  std::size_t violations = 0;  // pairs breaking either side
  std::size_t left_violations = 0;
  std::size_t right_violations = 0;
  std::optional<HHPairResult> first_violation;  // first in draw order
  std::uint64_t seed = 0;
  double tol = 0.0;
  bool exact = false;
  std::string f_provenance;
  std::string F_provenance;

  bool passed() const { return violations == 0; }
};

/// Checks the system on grid plus seeded pairs drawn from the interior of the
/// domain, or from the knots when F is a table.
inline HHScanReport hh_scan(const FuncDef& f, const Primitive& F, const Interval& domain, std::size_t pairs,
                            std::uint64_t seed, double tol) {
  if (pairs < 1) throw std::invalid_argument("hh scan needs at least one pair");
  detail::require_covered(f, domain);
  PairSampler sampler(domain, seed);
  std::vector<SamplePair> ps = F.is_table() ? sampler.draw_from(F.knots(), pairs) : sampler.draw(pairs);
  std::vector<std::optional<HHPairResult>> res(ps.size());
  detail::parallel_for(ps.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) res[i] = hh_check_pair(f, F, ps[i].x, ps[i].y, tol);
  }, 256);
  HHScanReport rep;
  rep.pairs_tested = ps.size();
  rep.seed = seed;
  rep.tol = tol;
  rep.exact = f.exact_capable() && F.exact_capable();
  rep.f_provenance = "symbolic:" + f.text();
  rep.F_provenance = F.provenance();
  for (auto& r : res) {
    rep.left_violations += !r->left_holds;
    rep.right_violations += !r->right_holds;
    if (!r->holds()) {
      ++rep.violations;
      if (!rep.first_violation) rep.first_violation = std::move(*r);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Sandwich over refining partitions

struct SandwichRow {
  int depth = 0;
  std::size_t cells = 0;
  Number midpoint_sum;
  Number delta_F;  // sum of F(t_j) - F(t_{j-1}) in partition order
  Number trapezoid_sum;
  Number gap;  // trapezoid_sum - midpoint_sum
  bool left_holds = false;   // midpoint_sum <= delta_F + tol
  bool right_holds = false;  // delta_F <= trapezoid_sum + tol
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  bool converged = false;
  Number limit;  // (midpoint_sum + trapezoid_sum) / 2 of the last row
  bool telescoping_exact = false;  // every delta_F equals F(y) - F(x) exactly
  bool telescoping_holds = false;  // ... or within tol in float mode
  Number total;                    // F(y) - F(x)
  bool exact = false;
  std::optional<int> first_broken_depth;
  std::optional<HHSide> first_broken_side;
  double tol = 0.0;
};

/// Rows for the partitions uniform(x, y, 2^(d-1)), d = 1..max_depth, stopping
/// once |trapezoid - midpoint| <= tol.
inline SandwichReport sandwich(const FuncDef& f, const Primitive& F, const Rational& x, const Rational& y,
                               int max_depth, double tol, bool exact = true) {
  if (!(x < y)) throw std::invalid_argument("sandwich needs x < y");
  if (max_depth < 1 || max_depth > kDefaultMaxDepth)
    throw std::invalid_argument("sandwich depth must be in [1, " + std::to_string(kDefaultMaxDepth) + "]");
  if (!f.domain().covers(x, y)) throw std::invalid_argument("sandwich interval leaves the domain of '" + f.name() + "'");
  if (F.is_table()) throw std::invalid_argument("sandwich needs a symbolic primitive");
  bool ex = exact && f.exact_capable() && F.exact_capable();
  Arithmetic mode = ex ? Arithmetic::Exact : Arithmetic::Float;

  SandwichReport rep;
  rep.tol = tol;
  rep.exact = ex;
  rep.total = ex ? Number::of(*F.value(y, true).exact - *F.value(x, true).exact)
                 : Number::approx(F.eval<double>(y) - F.eval<double>(x));
  rep.telescoping_exact = ex;
  rep.telescoping_holds = true;

  for (int d = 1; d <= max_depth; ++d) {
    KPartition p = uniform(x, y, std::uint64_t{1} << (d - 1));
    SandwichRow row;
    row.depth = d;
    row.cells = p.cells();
    row.midpoint_sum = tagged_sum(f, p, TagRule::Midpoint, mode);
    row.trapezoid_sum = trapezoid_sum(f, p, mode);
    std::vector<Number> Fv(p.cells() + 1);
    detail::parallel_for(Fv.size(), [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i)
        Fv[i] = ex ? F.value(p.point(i), true) : Number::approx(F.eval<double>(p.point(i)));
    });
    Number delta = ex ? Number::of(0) : Number::approx(0);
    for (std::size_t j = 1; j < Fv.size(); ++j) delta = delta + (Fv[j] - Fv[j - 1]);
    row.delta_F = delta;
    row.gap = row.trapezoid_sum - row.midpoint_sum;
    row.left_holds = leq_with_tol(row.midpoint_sum, row.delta_F, tol);
    row.right_holds = leq_with_tol(row.delta_F, row.trapezoid_sum, tol);
    if (ex) {
      rep.telescoping_exact = rep.telescoping_exact && *row.delta_F.exact == *rep.total.exact;
      rep.telescoping_holds = rep.telescoping_exact;
    } else {
      rep.telescoping_holds = rep.telescoping_holds && std::abs(row.delta_F.value - rep.total.value) <= tol;
    }
    if (!rep.first_broken_depth && !(row.left_holds && row.right_holds)) {
      rep.first_broken_depth = d;
      rep.first_broken_side = row.left_holds ? HHSide::Right : HHSide::Left;
    }
    rep.rows.push_back(std::move(row));
    if (std::abs(rep.rows.back().gap.value) <= tol &&
        (!rep.rows.back().gap.exact || abs(*rep.rows.back().gap.exact) <= Rational::from_double(tol))) {
      rep.converged = true;
      break;
    }
  }
  const SandwichRow& last = rep.rows.back();
  rep.limit = detail::midpoint(last.midpoint_sum, last.trapezoid_sum);
  return rep;
}

// ---------------------------------------------------------------------------
// Primitive identity, derivative squeeze, reconstruction

struct PrimitiveIdentityReport {
  bool holds = false;
  bool indeterminate = false;  // the integral did not converge
  Number delta_F;
  IntegralEstimate integral;
  double discrepancy = 0.0;
  double allowance = 0.0;  // max(tol, bracket width)
};

/// F(y) - F(x) against the K-integral of f over [x, y].
inline PrimitiveIdentityReport derive_primitive_identity(const FuncDef& f, const Primitive& F, const Rational& x,
                                                         const Rational& y, double tol, IntegrateOptions opt = {}) {
  if (!(x < y)) throw std::invalid_argument("primitive identity needs x < y");
  opt.tol = tol;
  PrimitiveIdentityReport r;
  r.integral = integrate(f, x, y, opt);
  bool ex = F.exact_capable() && r.integral.exact;
  r.delta_F = ex ? Number::of(*F.value(y, true).exact - *F.value(x, true).exact)
                 : Number::approx(F.eval<long double>(y) - F.eval<long double>(x));
  r.indeterminate = !r.integral.converged;
  r.allowance = std::max(tol, r.integral.width());
  Number diff = r.delta_F - r.integral.value;
  r.discrepancy = std::abs(diff.value);
  r.holds = diff.exact ? abs(*diff.exact) <= Rational::from_double(r.allowance) : r.discrepancy <= r.allowance;
  return r;
}

struct DerivativeStep {
  Rational h;  // signed step; y = x + h
  HHPairResult pair;
};

struct DerivativeReport {
  bool holds = false;
  bool squeeze_holds = false;
  bool converges = false;
  Number f_at_x;
  std::vector<DerivativeStep> steps;  // for each |h|: +h, then -h
  double final_error_plus = 0.0;      // |quotient(+h_min) - f(x)|
  double final_error_minus = 0.0;     // |quotient(-h_min) - f(x)|
};

/// h = 10^-1 .. 10^-k as exact rationals.
inline std::vector<Rational> decimal_steps(int k = 6) {
  std::vector<Rational> hs;
  Rational h(1);
  for (int i = 1; i <= k; ++i) hs.push_back(h /= Rational(10));
  return hs;
}

/// For each h and both signs, checks f(x+h/2) <= (F(x+h)-F(x))/h <= (f(x+h)+f(x))/2
/// with the quotient oriented by sign(h), then that the quotients at the
/// smallest |h| are within tol of f(x). One-sided quotients keep kinks honest.
inline DerivativeReport derivative_check(const FuncDef& f, const Primitive& F, const Rational& x,
                                         const std::vector<Rational>& hs, double tol) {
  if (hs.empty()) throw std::invalid_argument("derivative check needs a non-empty step schedule");
  for (const auto& h : hs) {
    if (h.sign() <= 0) throw std::invalid_argument("step sizes must be positive");
    if (!f.domain().contains(x + h) || !f.domain().contains(x - h) || !f.domain().contains(x))
      throw std::invalid_argument("step " + h.str() + " leaves the domain of '" + f.name() + "'");
  }
  DerivativeReport r;
  bool ex = f.exact_capable() && F.exact_capable();
  r.f_at_x = f.evaluate(x, ex);
  r.squeeze_holds = true;
  Rational h_min = *std::min_element(hs.begin(), hs.end());
  for (const auto& h : hs) {
    for (int sign : {+1, -1}) {
      Rational step = sign > 0 ? h : -h;
      HHPairResult p = hh_check_pair(f, F, x, x + step, tol);
      r.squeeze_holds = r.squeeze_holds && p.holds();
      if (h == h_min) {
        double err = std::abs((p.difference_quotient - r.f_at_x).value);
        (sign > 0 ? r.final_error_plus : r.final_error_minus) = err;
      }
      r.steps.push_back({step, std::move(p)});
    }
  }
  r.converges = r.final_error_plus <= tol && r.final_error_minus <= tol;
  r.holds = r.squeeze_holds && r.converges;
  return r;
}

struct ReconstructedPoint {
  Rational x;
  Number value;  // F(x) with F(base) = 0
  bool converged = true;
  double width = 0.0;
};

/// F(x) = integral of f from base to x, negated for x < base.
inline std::vector<ReconstructedPoint> reconstruct_primitive(const FuncDef& f, const Rational& base,
                                                             const std::vector<Rational>& xs, double tol,
                                                             IntegrateOptions opt = {}) {
  opt.tol = tol;
  std::vector<ReconstructedPoint> out;
  for (const auto& x : xs) {
    if (!f.domain().contains(x) || !f.domain().contains(base))
      throw std::invalid_argument("reconstruction point " + x.str() + " leaves the domain of '" + f.name() + "'");
    if (x == base) {
      out.push_back({x, Number::of(0), true, 0.0});
      continue;
    }
    bool forward = base < x;
    IntegralEstimate e = forward ? integrate(f, base, x, opt) : integrate(f, x, base, opt);
    Number v = forward ? e.value : Number::of(0) - e.value;
    out.push_back({x, v, e.converged, e.width()});
  }
  return out;
}

/// The reconstructed values as a table primitive.
inline Primitive reconstructed_primitive(const std::vector<ReconstructedPoint>& pts) {
  std::vector<std::pair<Rational, Number>> t;
  for (const auto& p : pts) t.emplace_back(p.x, p.value);
  return Primitive::table(std::move(t), Primitive::Source::Reconstructed);
}

}  // namespace hhlab
