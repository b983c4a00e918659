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

// Pair sampling and the pointwise Hermite-Hadamard check shared by the
// convexity and hh modules.

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "funcdef.hpp"
#include "rational.hpp"

namespace hhlab {

/// Where a primitive's values come from. Tables answer only at their knots;
/// there is no interpolation.
class Primitive {
 public:
  enum class Source { Symbolic, Table, Reconstructed };

  Primitive(FuncDef F) : source_(Source::Symbolic), symbolic_(std::move(F)) {}  // NOLINT(google-explicit-constructor)

  static Primitive table(std::vector<std::pair<Rational, Number>> points, Source source = Source::Table) {
    if (points.size() < 2) throw std::invalid_argument("a primitive table needs at least two points");
    Primitive p;
    p.source_ = source;
    for (auto& [x, v] : points)
      if (!p.table_.emplace(std::move(x), std::move(v)).second)
        throw std::invalid_argument("duplicate knot in primitive table");
    return p;
  }

  Source source() const { return source_; }
  bool is_table() const { return source_ != Source::Symbolic; }
  const std::optional<FuncDef>& symbolic() const { return symbolic_; }

  std::string provenance() const {
    switch (source_) {
      case Source::Symbolic: return "symbolic:" + symbolic_->text();
      case Source::Table: return "table:" + std::to_string(table_.size()) + " points";
      case Source::Reconstructed: return "reconstructed:" + std::to_string(table_.size()) + " points";
    }
    return "?";
  }

  bool exact_capable() const {
    if (symbolic_) return symbolic_->exact_capable();
    return std::all_of(table_.begin(), table_.end(), [](const auto& kv) { return kv.second.is_exact(); });
  }

  std::vector<Rational> knots() const {
    std::vector<Rational> k;
    for (const auto& kv : table_) k.push_back(kv.first);
    return k;
  }

  Number value(const Rational& x, bool exact) const {
    if (symbolic_) return symbolic_->evaluate(x, exact);
    auto it = table_.find(x);
    if (it == table_.end()) throw DomainError("primitive table has no value at " + x.str());
    return exact ? it->second : Number::approx(it->second.value);
  }

  template <std::floating_point T>
  T eval(const Rational& x) const {
    if (symbolic_) return symbolic_->eval(x.to_float<T>());
    return static_cast<T>(value(x, false).value);
  }

 private:
  Primitive() = default;
  Source source_ = Source::Symbolic;
  std::optional<FuncDef> symbolic_;
  std::map<Rational, Number> table_;
};

/// One sampled pair; lambda weights x: the tested point is lambda*x + (1-lambda)*y.
struct SamplePair {
  Rational x;
  Rational y;
  Rational lambda{1, 2};
};

/// Deterministic and seeded pairs on the interior of an interval.
///
/// The interval is first shrunk by a relative margin so closed-interval input
/// only yields interior points. A coarse grid of all point pairs comes first,
/// then random pairs on a 2^20 lattice whose members are at least 1e-4 of the
/// width apart (closer pairs lose the difference quotient to cancellation).
class PairSampler {
 public:
  static constexpr std::uint64_t kLattice = std::uint64_t{1} << 20;
  static constexpr std::uint64_t kMinSeparation = 105;  // ceil(1e-4 * 2^20)

  PairSampler(const Interval& domain, std::uint64_t seed) : seed_(seed) {
    Rational margin = domain.width() * Rational(1, 1000000000);
    lo_ = domain.lo + margin;
    width_ = domain.width() - margin * Rational(2);
  }

  const Rational& lo() const { return lo_; }
  const Rational& width() const { return width_; }

  /// count pairs; with max_den >= 2 the weights run over fractions of
  /// denominator <= max_den, otherwise they are 1/2.
  std::vector<SamplePair> draw(std::size_t count, long long max_den = 0) const {
    std::vector<SamplePair> out;
    out.reserve(count);
    std::vector<Rational> weights = weight_cycle(max_den);
    std::size_t k = 2;
    while ((k + 1) * k / 2 <= std::max<std::size_t>(1, count / 2)) ++k;
    std::vector<Rational> grid(k);
    for (std::size_t i = 0; i < k; ++i) grid[i] = lo_ + width_ * Rational(static_cast<long long>(i), static_cast<long long>(k - 1));
    for (std::size_t i = 0; i < k && out.size() < count; ++i)
      for (std::size_t j = i + 1; j < k && out.size() < count; ++j)
        out.push_back({grid[i], grid[j], weights[out.size() % weights.size()]});

    std::mt19937_64 rng(seed_);
    while (out.size() < count) {
      std::uint64_t m = rng() % (kLattice + 1), n = rng() % (kLattice + 1);
      if ((m > n ? m - n : n - m) < kMinSeparation) continue;
      Rational lambda = weights.size() == 1 ? weights[0] : random_weight(rng, max_den);
      out.push_back({at(m), at(n), std::move(lambda)});
    }
    return out;
  }

  /// Pairs of table knots strictly inside the interval; grid order, then seeded.
  std::vector<SamplePair> draw_from(const std::vector<Rational>& knots, std::size_t count) const {
    std::vector<Rational> inside;
    for (const auto& k : knots)
      if (lo_ <= k && k <= lo_ + width_) inside.push_back(k);
    if (inside.size() < 2) throw std::invalid_argument("primitive table has fewer than two knots in the scan interval");
    std::vector<SamplePair> out;
    std::size_t total = inside.size() * (inside.size() - 1) / 2;
    if (count >= total) {
      for (std::size_t i = 0; i < inside.size(); ++i)
        for (std::size_t j = i + 1; j < inside.size(); ++j) out.push_back({inside[i], inside[j]});
      return out;
    }
    std::mt19937_64 rng(seed_);
    while (out.size() < count) {
      std::size_t i = rng() % inside.size(), j = rng() % inside.size();
      if (i != j) out.push_back({inside[i], inside[j]});
    }
    return out;
  }

 private:
  Rational at(std::uint64_t n) const {
    return lo_ + width_ * Rational(BigInt(n), BigInt(kLattice));
  }

  static std::vector<Rational> weight_cycle(long long max_den) {
    if (max_den < 2) return {Rational(1, 2)};
    std::vector<Rational> w;
    for (long long q = 2; q <= max_den; ++q)
      for (long long p = 1; p < q; ++p)
        if (std::gcd(p, q) == 1) w.emplace_back(p, q);
    return w;
  }

  static Rational random_weight(std::mt19937_64& rng, long long max_den) {
    long long q = 2 + static_cast<long long>(rng() % static_cast<std::uint64_t>(max_den - 1));
    long long p = 1 + static_cast<long long>(rng() % static_cast<std::uint64_t>(q - 1));
    return Rational(p, q);
  }

  std::uint64_t seed_;
  Rational lo_;
  Rational width_;
};

/// The three members of the Hermite-Hadamard system at one pair.
struct HHPairResult {
  Rational x;
  Rational y;
  Number midpoint_value;       // f((x+y)/2)
  Number difference_quotient;  // (F(y)-F(x))/(y-x)
  Number endpoint_average;     // (f(x)+f(y))/2
  bool left_holds = false;
  bool right_holds = false;
  double tol = 0.0;
  bool exact = false;

  bool holds() const { return left_holds && right_holds; }
};

/// Evaluates the system with T-precision floats, ignoring exactness.
template <std::floating_point T>
HHPairResult hh_check_pair_float(const FuncDef& f, const Primitive& F, const Rational& x, const Rational& y,
                                 double tol) {
  if (x == y) throw std::invalid_argument("hh check needs x != y");
  T xf = x.to_float<T>(), yf = y.to_float<T>();
  T mid = f.eval<T>(((x + y) / Rational(2)).to_float<T>());
  T q = (F.eval<T>(y) - F.eval<T>(x)) / (yf - xf);
  T avg = (f.eval<T>(xf) + f.eval<T>(yf)) / 2;
  HHPairResult r{x, y, Number::approx(static_cast<double>(mid)), Number::approx(static_cast<double>(q)),
                 Number::approx(static_cast<double>(avg))};
  r.left_holds = mid <= q + static_cast<T>(tol);
  r.right_holds = q <= avg + static_cast<T>(tol);
  r.tol = tol;
  return r;
}

/// Evaluates the system exactly when f and F allow it, in double otherwise.
inline HHPairResult hh_check_pair(const FuncDef& f, const Primitive& F, const Rational& x, const Rational& y,
                                  double tol) {
  if (x == y) throw std::invalid_argument("hh check needs x != y");
  if (!f.domain().contains(x) || !f.domain().contains(y))
    throw std::invalid_argument("pair (" + x.str() + ", " + y.str() + ") leaves the domain of '" + f.name() + "'");
  if (!(f.exact_capable() && F.exact_capable())) return hh_check_pair_float<double>(f, F, x, y, tol);
  Number mid = f.evaluate((x + y) / Rational(2), true);
  Number q = Number::of((*F.value(y, true).exact - *F.value(x, true).exact) / (y - x));
  Number avg = Number::of((*f.evaluate(x, true).exact + *f.evaluate(y, true).exact) / Rational(2));
  HHPairResult r{x, y, mid, q, avg};
  r.left_holds = leq_with_tol(mid, q, tol);
  r.right_holds = leq_with_tol(q, avg, tol);
  r.tol = tol;
  r.exact = true;
  return r;
}

}  // namespace hhlab
