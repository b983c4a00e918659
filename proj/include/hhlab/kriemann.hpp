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
 * @file kriemann.hpp
 * @brief Upper/lower K-Riemann sums, tagged sums and the K-integral driver.
 *
 * For a partition pi = (t_0, ..., t_n) the upper sum is sum M_i (t_i - t_{i-1})
 * with M_i the supremum of f over the K-points of the i-th cell, and dually
 * for the lower sum. Suprema of black-box functions cannot be computed, so
 * every sum is taken under an explicit BoundStrategy:
 *
 *  - EndpointConvex: for verified convex f the cell supremum is the larger
 *    endpoint value (exact); the infimum is located with neighbour tests and
 *    a tolerance-bounded golden-section search. Concave f is mirrored and
 *    affine f uses endpoints on both sides.
 *  - DenseSample(k): k equally spaced rational probes per cell.
 *  - UserOracle: a caller-supplied (inf, sup) per cell.
 *
 * The integral driver walks a refinement schedule and keeps the bracket
 * [max lower sum, min upper sum].
 */

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "funcdef.hpp"
#include "parallel.hpp"
#include "partition.hpp"
#include "rational.hpp"

namespace hhlab {

struct CellBounds {
  double inf;
  double sup;
};

/// Called with the exact cell endpoints; returns estimates of inf and sup.
using BoundOracle = std::function<CellBounds(const Rational& lo, const Rational& hi)>;

class BoundStrategy {
 public:
  enum class Kind { EndpointConvex, DenseSample, UserOracle };

  static BoundStrategy endpoint_convex() { return BoundStrategy(Kind::EndpointConvex); }
  static BoundStrategy dense_sample(int count) {
    if (count < 2) throw std::invalid_argument("dense sampling needs at least 2 probes per cell");
    BoundStrategy s(Kind::DenseSample);
    s.count_ = count;
    return s;
  }
  static BoundStrategy user_oracle(BoundOracle oracle) {
    if (!oracle) throw std::invalid_argument("user oracle must be callable");
    BoundStrategy s(Kind::UserOracle);
    s.oracle_ = std::move(oracle);
    return s;
  }

  Kind kind() const { return kind_; }
  int count() const { return count_; }
  const BoundOracle& oracle() const { return oracle_; }

  std::string describe() const {
    switch (kind_) {
      case Kind::EndpointConvex: return "endpoint";
      case Kind::DenseSample: return "dense:" + std::to_string(count_);
      case Kind::UserOracle: return "oracle";
    }
    return "?";
  }

 private:
  explicit BoundStrategy(Kind k) : kind_(k) {}
  Kind kind_;
  int count_ = 0;
  BoundOracle oracle_;
};

/// Exact asks for rational arithmetic throughout; it silently degrades to
/// float when f has transcendental nodes or the partition is over R.
enum class Arithmetic { Float, Exact };

struct SumReport {
  KPartition partition;
  Number lower;
  Number upper;
  Number trapezoid;
  std::string strategy;
  Shape shape = Shape::Unknown;  // shape the endpoint strategy relied on
  bool exact = false;
  Number global_inf;  // m = min of cell infima
  Number global_sup;  // M = max of cell suprema
};

namespace detail {

inline bool use_exact(const FuncDef& f, const KPartition& p, Arithmetic mode) {
  return mode == Arithmetic::Exact && f.exact_capable() && p.field() == KField::Rationals;
}

struct Grid {
  std::vector<double> t;    // t_i as doubles
  std::vector<double> v;    // f(t_i)
  std::vector<Rational> q;  // exact f(t_i), only in exact mode
  bool exact = false;
};

inline Grid evaluate_grid(const FuncDef& f, const KPartition& p, bool exact) {
  Grid g;
  g.exact = exact;
  std::size_t n = p.cells() + 1;
  g.t.resize(n);
  g.v.resize(n);
  if (exact) g.q.resize(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      g.t[i] = p.point_value(i);
      if (exact) {
        g.q[i] = *f.body().eval_exact(p.point(i));
        g.v[i] = g.q[i].to_double();
      } else {
        g.v[i] = f(g.t[i]);
      }
    }
  });
  return g;
}

// sign * f(t_i) <= sign * f(t_j), exactly when possible.
inline bool cmp_le(const Grid& g, std::size_t i, std::size_t j, int sign) {
  if (g.exact) return sign > 0 ? g.q[i] <= g.q[j] : g.q[j] <= g.q[i];
  return sign * g.v[i] <= sign * g.v[j];
}

// Convexity of sign * f across consecutive grid triples, in the cross-multiplied
// divided-difference form (f2 - f1)(t1 - t0) >= (f1 - f0)(t2 - t1).
inline std::optional<std::size_t> first_shape_violation(const Grid& g, const KPartition& p, int sign) {
  std::size_t n = p.cells();
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t i = 1; i < n; ++i) {
    if (g.exact) {
      Rational hl = p.point(i) - p.point(i - 1), hr = p.point(i + 1) - p.point(i);
      Rational lhs = (g.q[i + 1] - g.q[i]) * hl, rhs = (g.q[i] - g.q[i - 1]) * hr;
      if (sign > 0 ? lhs < rhs : rhs < lhs) return i;
    } else {
      double hl = g.t[i] - g.t[i - 1], hr = g.t[i + 1] - g.t[i];
      double lhs = sign * (g.v[i + 1] - g.v[i]) * hl, rhs = sign * (g.v[i] - g.v[i - 1]) * hr;
      double slack = 8 * eps * ((std::abs(g.v[i + 1]) + std::abs(g.v[i])) * hl + (std::abs(g.v[i]) + std::abs(g.v[i - 1])) * hr);
      if (lhs < rhs - slack) return i;
    }
  }
  return std::nullopt;
}

inline Shape resolve_endpoint_shape(const FuncDef& f, const Grid& g, const KPartition& p) {
  if (f.affine()) return Shape::Affine;
  Shape declared = f.declared_shape();
  if (declared == Shape::Unknown)
    throw StrategyMisuse("endpoint strategy requires a convex, concave or affine function; '" + f.name() +
                         "' has unknown shape");
  auto verify = [&](int sign, const char* what) {
    if (auto i = first_shape_violation(g, p, sign))
      throw StrategyMisuse("'" + f.name() + "' is declared " + shape_name(declared).data() +
                           " but is not " + what + " on the partition near t = " +
                           std::to_string(p.point_value(*i)));
  };
  if (declared == Shape::Convex || declared == Shape::Affine) verify(+1, "convex");
  if (declared == Shape::Concave || declared == Shape::Affine) verify(-1, "concave");
  return declared;
}

// Result of a per-cell extremum: either a grid index (exact when the grid is)
// or a float value from a search or probe.
struct CellExtremum {
  std::ptrdiff_t index = -1;
  double value = 0.0;
};

// Minimum of sign * f over cell i = [t_{i-1}, t_i] for sign * f convex.
inline CellExtremum convex_cell_min(const FuncDef& f, const KPartition& p, const Grid& g, std::size_t i, int sign) {
  std::size_t n = p.cells(), l = i - 1, r = i;
  // Chord slope >= 0 left of the cell: nondecreasing from t_l on.
  if (i >= 2 && cmp_le(g, l - 1, l, sign)) return {static_cast<std::ptrdiff_t>(l), 0.0};
  // Chord slope <= 0 right of the cell: nonincreasing up to t_r.
  if (i + 1 <= n && cmp_le(g, r + 1, r, sign)) return {static_cast<std::ptrdiff_t>(r), 0.0};
  double tl = g.t[l], tr = g.t[r];
  double tol = (tr - tl) * 1e-9;
  auto h = [&](double t) { return sign * f(t); };
  double vl = sign * g.v[l], vr = sign * g.v[r];
  if (h(tl + tol) >= vl) return {static_cast<std::ptrdiff_t>(l), 0.0};
  if (h(tr - tol) >= vr) return {static_cast<std::ptrdiff_t>(r), 0.0};
  // Golden-section search down to a bracket of width tol.
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double lo = tl, hi = tr;
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double fc = h(c), fd = h(d);
  while (hi - lo > tol) {
    if (fc <= fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = h(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = h(d);
    }
  }
  double best = std::min({fc, fd, h(0.5 * (lo + hi)), vl, vr});
  return {-1, sign * best};
}

}  // namespace detail

/// Lower and upper sums (plus the trapezoid value) of f over p.
inline SumReport darboux_sums(const FuncDef& f, const KPartition& p, const BoundStrategy& s,
                              Arithmetic mode = Arithmetic::Exact) {
  if (!f.domain().covers(p.a(), p.b()))
    throw std::invalid_argument("partition [" + p.a().str() + ", " + p.b().str() + "] leaves the domain of '" +
                                f.name() + "'");
  bool exact_grid = detail::use_exact(f, p, mode);
  detail::Grid g = detail::evaluate_grid(f, p, exact_grid);
  std::size_t n = p.cells();

  SumReport rep{p, {}, {}, {}, s.describe(), Shape::Unknown, false, {}, {}};
  Shape shape = Shape::Unknown;
  if (s.kind() == BoundStrategy::Kind::EndpointConvex) shape = detail::resolve_endpoint_shape(f, g, p);
  rep.shape = shape;

  // Per-cell inf/sup. Exact entries are filled only when every cell stays exact.
  std::vector<double> inf_d(n), sup_d(n);
  std::vector<std::optional<Rational>> inf_q(exact_grid ? n : 0), sup_q(exact_grid ? n : 0);

  auto from_index = [&](std::size_t cell, std::ptrdiff_t idx, double val, bool is_sup) {
    auto& d = is_sup ? sup_d : inf_d;
    if (idx >= 0) {
      d[cell] = g.v[static_cast<std::size_t>(idx)];
      if (exact_grid) (is_sup ? sup_q : inf_q)[cell] = g.q[static_cast<std::size_t>(idx)];
    } else {
      d[cell] = val;
    }
  };

  detail::parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      std::size_t i = c + 1;
      switch (s.kind()) {
        case BoundStrategy::Kind::EndpointConvex: {
          auto lo_idx = static_cast<std::ptrdiff_t>(i - 1), hi_idx = static_cast<std::ptrdiff_t>(i);
          bool left_smaller = detail::cmp_le(g, i - 1, i, +1);
          std::ptrdiff_t min_end = left_smaller ? lo_idx : hi_idx, max_end = left_smaller ? hi_idx : lo_idx;
          if (shape == Shape::Affine) {
            from_index(c, min_end, 0, false);
            from_index(c, max_end, 0, true);
          } else if (shape == Shape::Convex) {
            from_index(c, max_end, 0, true);
            auto m = detail::convex_cell_min(f, p, g, i, +1);
            from_index(c, m.index, m.value, false);
          } else {
            from_index(c, min_end, 0, false);
            auto m = detail::convex_cell_min(f, p, g, i, -1);
            from_index(c, m.index, m.value, true);
          }
          break;
        }
        case BoundStrategy::Kind::DenseSample: {
          int k = s.count();
          double lo = std::min(g.v[i - 1], g.v[i]), hi = std::max(g.v[i - 1], g.v[i]);
          std::optional<Rational> lo_q, hi_q;
          if (exact_grid) {
            lo_q = std::min(g.q[i - 1], g.q[i]);
            hi_q = std::max(g.q[i - 1], g.q[i]);
          }
          Rational tl = exact_grid ? p.point(i - 1) : Rational(), w = exact_grid ? p.point(i) - tl : Rational();
          double tld = g.t[i - 1], wd = g.t[i] - tld;
          for (int j = 1; j < k - 1; ++j) {
            if (exact_grid) {
              Rational v = *f.body().eval_exact(tl + w * Rational(j, k - 1));
              if (v < *lo_q) lo_q = v;
              if (*hi_q < v) hi_q = v;
            } else {
              double v = f(tld + wd * (static_cast<double>(j) / (k - 1)));
              lo = std::min(lo, v);
              hi = std::max(hi, v);
            }
          }
          if (exact_grid) {
            inf_d[c] = lo_q->to_double();
            sup_d[c] = hi_q->to_double();
            inf_q[c] = std::move(lo_q);
            sup_q[c] = std::move(hi_q);
          } else {
            inf_d[c] = lo;
            sup_d[c] = hi;
          }
          break;
        }
        case BoundStrategy::Kind::UserOracle: {
          CellBounds b = s.oracle()(p.point(i - 1), p.point(i));
          if (!(b.inf <= b.sup)) throw std::invalid_argument("oracle returned inf > sup");
          inf_d[c] = b.inf;
          sup_d[c] = b.sup;
          break;
        }
      }
    }
  });

  auto all_set = [](const std::vector<std::optional<Rational>>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](const auto& x) { return x.has_value(); });
  };
  bool oracle = s.kind() == BoundStrategy::Kind::UserOracle;
  bool lower_exact = exact_grid && !oracle && all_set(inf_q);
  bool upper_exact = exact_grid && !oracle && all_set(sup_q);
  rep.exact = lower_exact && upper_exact;

  // Fixed left-to-right summation. Each side stays exact when all its cell
  // bounds are exact.
  auto side = [&](const std::vector<std::optional<Rational>>& q, const std::vector<double>& d, bool exact,
                  bool is_sup, Number& total, Number& extreme) {
    if (exact) {
      Rational sum(0), e = *q[0];
      for (std::size_t c = 0; c < n; ++c) {
        sum += *q[c] * (p.point(c + 1) - p.point(c));
        e = is_sup ? std::max(e, *q[c]) : std::min(e, *q[c]);
      }
      total = Number::of(sum);
      extreme = Number::of(e);
    } else {
      double sum = 0, e = d[0];
      for (std::size_t c = 0; c < n; ++c) {
        sum += d[c] * (g.t[c + 1] - g.t[c]);
        e = is_sup ? std::max(e, d[c]) : std::min(e, d[c]);
      }
      total = Number::approx(sum);
      extreme = Number::approx(e);
    }
  };
  side(inf_q, inf_d, lower_exact, false, rep.lower, rep.global_inf);
  side(sup_q, sup_d, upper_exact, true, rep.upper, rep.global_sup);
  if (exact_grid) {
    Rational trap(0);
    for (std::size_t c = 0; c < n; ++c) trap += (g.q[c] + g.q[c + 1]) * (p.point(c + 1) - p.point(c));
    rep.trapezoid = Number::of(trap / Rational(2));
  } else {
    double trap = 0;
    for (std::size_t c = 0; c < n; ++c) trap += 0.5 * (g.v[c] + g.v[c + 1]) * (g.t[c + 1] - g.t[c]);
    rep.trapezoid = Number::approx(trap);
  }
  return rep;
}

/// U_K(f, p) under strategy s.
inline Number upper_sum(const FuncDef& f, const KPartition& p, const BoundStrategy& s,
                        Arithmetic mode = Arithmetic::Exact) {
  return darboux_sums(f, p, s, mode).upper;
}

/// L_K(f, p) under strategy s.
inline Number lower_sum(const FuncDef& f, const KPartition& p, const BoundStrategy& s,
                        Arithmetic mode = Arithmetic::Exact) {
  return darboux_sums(f, p, s, mode).lower;
}

enum class TagRule { Left, Right, Midpoint };

inline std::string_view tag_rule_name(TagRule r) {
  switch (r) {
    case TagRule::Left: return "left";
    case TagRule::Right: return "right";
    case TagRule::Midpoint: return "midpoint";
  }
  return "?";
}

/// sum f(s_j)(t_j - t_{j-1}) with explicit tags; each s_j must lie in its cell.
inline Number tagged_sum(const FuncDef& f, const KPartition& p, const std::vector<Rational>& tags,
                         Arithmetic mode = Arithmetic::Exact) {
  std::size_t n = p.cells();
  if (tags.size() != n)
    throw std::invalid_argument("expected " + std::to_string(n) + " tags, got " + std::to_string(tags.size()));
  for (std::size_t j = 0; j < n; ++j)
    if (tags[j] < p.point(j) || p.point(j + 1) < tags[j])
      throw std::invalid_argument("tag " + tags[j].str() + " lies outside cell " + std::to_string(j + 1));
  bool exact = detail::use_exact(f, p, mode);
  Number sum = exact ? Number::of(0) : Number::approx(0);
  for (std::size_t j = 0; j < n; ++j) {
    if (exact) {
      sum = sum + Number::of(*f.body().eval_exact(tags[j]) * (p.point(j + 1) - p.point(j)));
    } else {
      sum.value += f(tags[j].to_double()) * (p.point_value(j + 1) - p.point_value(j));
    }
  }
  return sum;
}

/// Tagged sum with left, right or midpoint tags.
inline Number tagged_sum(const FuncDef& f, const KPartition& p, TagRule rule, Arithmetic mode = Arithmetic::Exact) {
  std::size_t n = p.cells();
  bool exact = detail::use_exact(f, p, mode);
  if (exact) {
    Rational sum(0);
    Rational prev = p.point(0);
    for (std::size_t j = 1; j <= n; ++j) {
      Rational cur = p.point(j);
      Rational s = rule == TagRule::Left ? prev : rule == TagRule::Right ? cur : (prev + cur) / Rational(2);
      sum += *f.body().eval_exact(s) * (cur - prev);
      prev = std::move(cur);
    }
    return Number::of(sum);
  }
  std::vector<double> terms(n);
  detail::parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      double l = p.point_value(c), r = p.point_value(c + 1);
      double s = rule == TagRule::Left ? l : rule == TagRule::Right ? r : 0.5 * (l + r);
      terms[c] = f(s) * (r - l);
    }
  });
  double sum = 0;
  for (double t : terms) sum += t;
  return Number::approx(sum);
}

/// Composite trapezoid value, half the sum of the left and right tagged sums.
inline Number trapezoid_sum(const FuncDef& f, const KPartition& p, Arithmetic mode = Arithmetic::Exact) {
  bool exact = detail::use_exact(f, p, mode);
  detail::Grid g = detail::evaluate_grid(f, p, exact);
  if (exact) {
    Rational sum(0);
    for (std::size_t c = 0; c < p.cells(); ++c) sum += (g.q[c] + g.q[c + 1]) * (p.point(c + 1) - p.point(c));
    return Number::of(sum / Rational(2));
  }
  double sum = 0;
  for (std::size_t c = 0; c < p.cells(); ++c)
    sum += 0.5 * (g.v[c] + g.v[c + 1]) * (p.point_value(c + 1) - p.point_value(c));
  return Number::approx(sum);
}

/// Integral of slope*x + intercept over [a, b]: its value at (a+b)/2 times (b-a).
inline Rational affine_integral_exact(const Rational& slope, const Rational& intercept, const Rational& a,
                                      const Rational& b) {
  if (!(a < b)) throw std::invalid_argument("affine integral needs a < b");
  return (slope * (a + b) / Rational(2) + intercept) * (b - a);
}

// ---------------------------------------------------------------------------
// Integration driver

struct ScheduleStep {
  enum class Kind { Dyadic, Uniform, Farey };
  Kind kind = Kind::Dyadic;
  long long param = 1;

  KPartition build(const Rational& a, const Rational& b, KField field) const {
    switch (kind) {
      case Kind::Dyadic: return dyadic(a, b, static_cast<int>(param), field);
      case Kind::Uniform: return uniform(a, b, static_cast<std::uint64_t>(param), field);
      case Kind::Farey:
        if (field != KField::Rationals) throw std::invalid_argument("farey schedules are rational partitions");
        return farey(a, b, param);
    }
    throw std::logic_error("bad schedule step");
  }
  std::string describe() const {
    const char* k = kind == Kind::Dyadic ? "dyadic" : kind == Kind::Uniform ? "uniform" : "farey";
    return std::string(k) + ":" + std::to_string(param);
  }
};

using Schedule = std::vector<ScheduleStep>;

inline constexpr int kDefaultMaxDepth = 20;

/// Dyadic depths 1..max_depth.
inline Schedule dyadic_schedule(int max_depth = kDefaultMaxDepth) {
  if (max_depth < 1 || max_depth > kDefaultMaxDepth)
    throw std::invalid_argument("schedule depth must be in [1, " + std::to_string(kDefaultMaxDepth) + "]");
  Schedule s;
  for (int d = 1; d <= max_depth; ++d) s.push_back({ScheduleStep::Kind::Dyadic, d});
  return s;
}

struct IntegrateOptions {
  double tol = 1e-6;
  Schedule schedule = dyadic_schedule();
  BoundStrategy strategy = BoundStrategy::endpoint_convex();
  KField field = KField::Rationals;
  bool exact = false;
};

struct TraceRow {
  int depth = 0;  // dyadic depth, or the 1-based step index for other schedules
  std::string partition;
  std::size_t cells = 0;
  Number lower;
  Number upper;
  Number midpoint;  // (lower + upper) / 2 of this step
  Number trapezoid;
};

struct IntegralEstimate {
  Number value;
  Number lower;
  Number upper;
  bool converged = false;
  bool exact = false;
  bool closed_form = false;      // bracket collapsed by the affine closed form
  bool bracket_crossed = false;  // approximate strategies produced lower > upper
  double tolerance = 0.0;
  std::string strategy;
  std::vector<std::string> schedule;
  std::vector<TraceRow> trace;

  double width() const { return upper.value - lower.value; }
};

namespace detail {

inline Number midpoint(const Number& a, const Number& b) {
  if (a.exact && b.exact) return Number::of((*a.exact + *b.exact) / Rational(2));
  return Number::approx(0.5 * (a.value + b.value));
}

inline bool less(const Number& a, const Number& b) {
  if (a.exact && b.exact) return *a.exact < *b.exact;
  return a.value < b.value;
}

}  // namespace detail

/// Brackets the K-integral of f over [a, b] between the largest lower sum and
/// the smallest upper sum seen along the schedule, stopping once the bracket
/// width is within tol. A structurally affine f has equal upper and lower
/// integrals g((a+b)/2)(b-a); after the first step the bracket collapses to it.
inline IntegralEstimate integrate(const FuncDef& f, const Rational& a, const Rational& b,
                                  const IntegrateOptions& opt = {}) {
  if (!(a < b)) throw std::invalid_argument("integrate needs a < b, got [" + a.str() + ", " + b.str() + "]");
  if (!(opt.tol > 0)) throw std::invalid_argument("integration tolerance must be positive");
  if (opt.schedule.empty()) throw std::invalid_argument("empty refinement schedule");
  Arithmetic mode = opt.exact ? Arithmetic::Exact : Arithmetic::Float;

  IntegralEstimate est;
  est.tolerance = opt.tol;
  est.strategy = opt.strategy.describe();
  bool all_exact = true;
  for (std::size_t k = 0; k < opt.schedule.size(); ++k) {
    const ScheduleStep& step = opt.schedule[k];
    KPartition p = step.build(a, b, opt.field);
    SumReport s = darboux_sums(f, p, opt.strategy, mode);
    all_exact = all_exact && s.exact;
    est.schedule.push_back(step.describe());
    int depth = step.kind == ScheduleStep::Kind::Dyadic ? static_cast<int>(step.param) : static_cast<int>(k + 1);
    est.trace.push_back({depth, p.label(), p.cells(), s.lower, s.upper, detail::midpoint(s.lower, s.upper), s.trapezoid});
    if (k == 0 || detail::less(est.lower, s.lower)) est.lower = s.lower;
    if (k == 0 || detail::less(s.upper, est.upper)) est.upper = s.upper;
    if (!all_exact) {
      est.lower = Number::approx(est.lower.value);
      est.upper = Number::approx(est.upper.value);
    }
    if (f.affine()) {
      Rational v = affine_integral_exact(f.affine()->slope, f.affine()->intercept, a, b);
      est.lower = est.upper = Number::of(v);
      est.closed_form = true;
      break;
    }
    if (est.upper.value - est.lower.value <= opt.tol) break;
  }
  if (detail::less(est.upper, est.lower)) {
    est.bracket_crossed = true;
    std::swap(est.lower, est.upper);
  }
  est.exact = est.lower.is_exact() && est.upper.is_exact();
  est.value = detail::midpoint(est.lower, est.upper);
  est.converged = est.closed_form || est.upper.value - est.lower.value <= opt.tol;
  return est;
}

struct AdditivityReport {
  bool holds = false;
  bool exact = false;
  IntegralEstimate whole;
  IntegralEstimate left;
  IntegralEstimate right;
  Number discrepancy;  // whole - (left + right)
};

/// Checks int_a^b = int_a^g + int_g^b, exactly when all three integrals are
/// exact and to within tol otherwise.
inline AdditivityReport interval_additivity_check(const FuncDef& f, const Rational& a, const Rational& g,
                                                  const Rational& b, double tol, IntegrateOptions opt = {}) {
  if (!(a < g && g < b)) throw std::invalid_argument("additivity check needs a < g < b");
  opt.tol = tol;
  AdditivityReport r;
  r.whole = integrate(f, a, b, opt);
  r.left = integrate(f, a, g, opt);
  r.right = integrate(f, g, b, opt);
  r.discrepancy = r.whole.value - (r.left.value + r.right.value);
  r.exact = r.discrepancy.is_exact();
  r.holds = r.exact ? r.discrepancy.exact->is_zero() : std::abs(r.discrepancy.value) <= tol;
  return r;
}

}  // namespace hhlab
