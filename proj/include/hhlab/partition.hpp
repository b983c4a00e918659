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
 * @file partition.hpp
 * @brief K-partitions of [a, b] for K = Q (rational coefficients) or K = R.
 *
 * A partition stores its relative coefficients alpha_0 = 0 < ... < alpha_n = 1;
 * the points are t_i = a + alpha_i (b - a). Uniform grids keep only n, so a
 * 2^20-cell dyadic grid costs nothing until a point is asked for.
 */

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace hhlab {

enum class KField { Rationals, Reals };

inline std::string field_name(KField f) { return f == KField::Rationals ? "Q" : "R"; }

class KPartition {
 public:
  /// Explicit coefficients. Throws std::invalid_argument unless
  /// 0 = alpha_0 < alpha_1 < ... < alpha_n = 1 with n >= 1 and a < b.
  KPartition(Rational a, Rational b, std::vector<Rational> alphas, KField field = KField::Rationals,
             std::string label = {})
      : a_(std::move(a)), b_(std::move(b)), field_(field), alphas_(std::move(alphas)), label_(std::move(label)) {
    check_interval(a_, b_);
    if (alphas_.size() < 2) throw std::invalid_argument("a partition needs at least two points");
    if (alphas_.front() != Rational(0) || alphas_.back() != Rational(1))
      throw std::invalid_argument("partition coefficients must start at 0 and end at 1");
    for (std::size_t i = 1; i < alphas_.size(); ++i)
      if (!(alphas_[i - 1] < alphas_[i]))
        throw std::invalid_argument("partition coefficients must be strictly increasing");
    Rational w = b_ - a_;
    points_d_.reserve(alphas_.size());
    for (const auto& al : alphas_) points_d_.push_back((a_ + al * w).to_double());
    if (label_.empty()) label_ = "explicit:" + std::to_string(cells());
  }

  /// Uniform grid alpha_i = i/n without materializing the coefficients.
  static KPartition uniform_grid(Rational a, Rational b, std::uint64_t n, KField field, std::string label) {
    check_interval(a, b);
    if (n == 0) throw std::invalid_argument("uniform partition needs n >= 1");
    KPartition p;
    p.a_ = std::move(a);
    p.b_ = std::move(b);
    p.field_ = field;
    p.uniform_n_ = n;
    p.a_d_ = p.a_.to_double();
    p.b_d_ = p.b_.to_double();
    p.label_ = std::move(label);
    return p;
  }

  /// Coefficients given as doubles; each is converted exactly. Marks the
  /// partition as an ordinary (K = R) partition.
  static KPartition from_real_coefficients(Rational a, Rational b, const std::vector<double>& alphas) {
    std::vector<Rational> r;
    r.reserve(alphas.size());
    for (double v : alphas) r.push_back(Rational::from_double(v));
    return KPartition(std::move(a), std::move(b), std::move(r), KField::Reals);
  }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  KField field() const { return field_; }
  bool is_uniform() const { return uniform_n_ != 0; }
  const std::string& label() const { return label_; }

  /// Number of cells n.
  std::size_t cells() const { return is_uniform() ? uniform_n_ : alphas_.size() - 1; }

  Rational alpha(std::size_t i) const {
    if (is_uniform()) return Rational(BigInt(i), BigInt(uniform_n_));
    return alphas_.at(i);
  }
  Rational point(std::size_t i) const {
    if (is_uniform()) {
      if (i == 0) return a_;
      if (i == uniform_n_) return b_;
    }
    return a_ + alpha(i) * (b_ - a_);
  }
  /// Floating value of t_i; the endpoints are the exact conversions of a and b.
  double point_value(std::size_t i) const {
    if (!is_uniform()) return points_d_.at(i);
    if (i == 0) return a_d_;
    if (i == uniform_n_) return b_d_;
    return a_d_ + (b_d_ - a_d_) * (static_cast<double>(i) / static_cast<double>(uniform_n_));
  }

  std::vector<Rational> alphas() const {
    if (!is_uniform()) return alphas_;
    std::vector<Rational> r;
    r.reserve(uniform_n_ + 1);
    for (std::uint64_t i = 0; i <= uniform_n_; ++i) r.push_back(alpha(i));
    return r;
  }
  std::vector<Rational> points() const {
    std::vector<Rational> r;
    r.reserve(cells() + 1);
    for (std::size_t i = 0; i <= cells(); ++i) r.push_back(point(i));
    return r;
  }

  /// Largest cell width max(t_i - t_{i-1}).
  Rational mesh() const {
    if (is_uniform()) return (b_ - a_) / Rational(BigInt(uniform_n_));
    Rational gap(0);
    for (std::size_t i = 1; i < alphas_.size(); ++i) gap = std::max(gap, alphas_[i] - alphas_[i - 1]);
    return gap * (b_ - a_);
  }

  /// Same coefficients on another interval.
  KPartition with_interval(Rational a, Rational b) const {
    if (is_uniform()) return uniform_grid(std::move(a), std::move(b), uniform_n_, field_, label_);
    return KPartition(std::move(a), std::move(b), alphas_, field_, label_);
  }

  friend bool operator==(const KPartition& p, const KPartition& q) {
    if (p.a_ != q.a_ || p.b_ != q.b_ || p.field_ != q.field_ || p.cells() != q.cells()) return false;
    if (p.is_uniform() && q.is_uniform()) return true;
    return p.alphas() == q.alphas();
  }

 private:
  KPartition() = default;

  static void check_interval(const Rational& a, const Rational& b) {
    if (!(a < b)) throw std::invalid_argument("partition interval needs a < b, got [" + a.str() + ", " + b.str() + "]");
  }

  Rational a_, b_;
  KField field_ = KField::Rationals;
  std::uint64_t uniform_n_ = 0;
  double a_d_ = 0.0, b_d_ = 0.0;
  std::vector<Rational> alphas_;
  std::vector<double> points_d_;
  std::string label_;
};

inline KPartition uniform(const Rational& a, const Rational& b, std::uint64_t n, KField field = KField::Rationals) {
  return KPartition::uniform_grid(a, b, n, field, "uniform:" + std::to_string(n));
}

inline constexpr int kMaxDyadicDepth = 30;

/// alpha_i = i / 2^depth.
inline KPartition dyadic(const Rational& a, const Rational& b, int depth, KField field = KField::Rationals) {
  if (depth < 1 || depth > kMaxDyadicDepth)
    throw std::invalid_argument("dyadic depth must be in [1, " + std::to_string(kMaxDyadicDepth) + "]");
  return KPartition::uniform_grid(a, b, std::uint64_t{1} << depth, field, "dyadic:" + std::to_string(depth));
}

/// Coefficients are the Farey sequence F_order, generated left to right by
/// the neighbour recurrence (each next term is a mediant-derived successor).
inline KPartition farey(const Rational& a, const Rational& b, long long order) {
  if (order < 1) throw std::invalid_argument("farey order must be >= 1");
  std::vector<Rational> alphas{Rational(0)};
  long long p = 0, q = 1, r = 1, s = order;
  while (r <= order) {
    long long k = (order + q) / s;
    long long np = k * r - p, nq = k * s - q;
    p = r;
    q = s;
    r = np;
    s = nq;
    alphas.emplace_back(p, q);
  }
  return KPartition(a, b, std::move(alphas), KField::Rationals, "farey:" + std::to_string(order));
}

/// n + 1 distinct coefficients with denominators <= max_den, always including
/// 0 and 1. Deterministic for a fixed seed.
inline KPartition random_rational(const Rational& a, const Rational& b, long long n, long long max_den,
                                  std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random partition needs n >= 1");
  if (max_den < n)
    throw std::invalid_argument("cannot place " + std::to_string(n + 1) + " distinct coefficients with denominators <= " +
                                std::to_string(max_den));
  std::mt19937_64 rng(seed);
  std::set<Rational> interior;
  while (static_cast<long long>(interior.size()) < n - 1) {
    long long q = 2 + static_cast<long long>(rng() % static_cast<std::uint64_t>(max_den - 1));
    long long p = 1 + static_cast<long long>(rng() % static_cast<std::uint64_t>(q - 1));
    interior.emplace(p, q);
  }
  std::vector<Rational> alphas{Rational(0)};
  alphas.insert(alphas.end(), interior.begin(), interior.end());
  alphas.emplace_back(1);
  return KPartition(a, b, std::move(alphas), KField::Rationals,
                    "random:" + std::to_string(n) + ":" + std::to_string(max_den) + ":" + std::to_string(seed));
}

/// Common refinement: the sorted union of both coefficient sets.
inline KPartition refine(const KPartition& p, const KPartition& q) {
  if (p.a() != q.a() || p.b() != q.b()) throw std::invalid_argument("refine: partitions cover different intervals");
  if (p.field() != q.field()) throw std::invalid_argument("refine: partitions use different fields");
  if (p.is_uniform() && q.is_uniform()) {
    std::size_t m = std::max(p.cells(), q.cells()), k = std::min(p.cells(), q.cells());
    if (m % k == 0) return p.cells() == m ? p : q;
  }
  std::set<Rational> all;
  for (const auto& al : p.alphas()) all.insert(al);
  for (const auto& al : q.alphas()) all.insert(al);
  return KPartition(p.a(), p.b(), std::vector<Rational>(all.begin(), all.end()), p.field());
}

inline Rational mesh(const KPartition& p) { return p.mesh(); }

}  // namespace hhlab
