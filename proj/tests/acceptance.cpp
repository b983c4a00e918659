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

// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "hhlab/convexity.hpp"
#include "hhlab/hh.hpp"
#include "hhlab/kriemann.hpp"

namespace {

using namespace hhlab;
using Clock = std::chrono::steady_clock;

// Pinned tolerances and budgets.
constexpr double kAffineTimeLimitS = 5.0;
constexpr double kForwardTol = 1e-12;
constexpr std::size_t kForwardPairs = 10000;
constexpr double kForwardTimeLimitS = 30.0;
constexpr std::size_t kWitnessBudget = 10000;
constexpr double kWitnessTol = 1e-12;
constexpr int kSandwichCheckedDepths = 12;
constexpr double kSandwichGapConstant = 1.0;
constexpr double kSandwichLimitTol = 1e-9;
constexpr double kSandwichTol = 1e-9;
constexpr int kOracleCells = 1000000;
constexpr double kOracleTol = 1e-6;
constexpr int kMonotonePairs = 50;
constexpr double kMonotoneSlack = 1e-9;
constexpr int kAdditivitySplits = 20;
constexpr double kAdditivityTol = 1e-8;
constexpr int kDerivativePoints = 20;
constexpr double kDerivativeTol = 1e-4;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

FuncDef builtin(std::string_view n) { return *find_builtin(n); }

Rational random_rational(std::mt19937_64& rng, long long span, long long max_den) {
  long long q = 1 + static_cast<long long>(rng() % static_cast<std::uint64_t>(max_den));
  long long p = static_cast<long long>(rng() % static_cast<std::uint64_t>(2 * span * q + 1)) - span * q;
  return Rational(p, q);
}

// 1. Trapezoid sums of affine functions equal the closed form exactly.
Outcome affine_identity() {
  auto t0 = Clock::now();
  std::mt19937_64 rng(1001);
  int partitions = 0;
  for (int i = 0; i < 100; ++i) {
    Rational m = random_rational(rng, 20, 12), c = random_rational(rng, 20, 12);
    Rational a = random_rational(rng, 10, 8);
    Rational b = a + Rational(1 + static_cast<long long>(rng() % 40), 1 + static_cast<long long>(rng() % 9));
    FuncDef g("g", Expr::literal(m) * Expr::var() + Expr::literal(c));
    Rational closed = affine_integral_exact(m, c, a, b);
    std::vector<KPartition> ps{uniform(a, b, 1 + rng() % 50), dyadic(a, b, 1 + static_cast<int>(rng() % 8)),
                               farey(a, b, 1 + static_cast<long long>(rng() % 12)),
                               hhlab::random_rational(a, b, 1 + static_cast<long long>(rng() % 30), 64, rng())};
    for (const auto& p : ps) {
      Number t = trapezoid_sum(g, p);
      ++partitions;
      if (!t.exact || *t.exact != closed)
        return {false, "function " + std::to_string(i) + " on " + p.label() + ": " + t.str() + " != " + closed.str()};
    }
  }
  double s = seconds_since(t0);
  return {s < kAffineTimeLimitS,
          std::to_string(partitions) + " partitions exact, " + std::to_string(s) + " s (limit 5 s)"};
}

// 2. No violations for the convex suite.
Outcome forward_hh() {
  auto t0 = Clock::now();
  std::ostringstream d;
  bool ok = true;
  for (const char* n : {"square", "quartic", "abs", "exp", "relu"}) {
    FuncDef f = builtin(n);
    HHScanReport r = hh_scan(f, *f.primitive(), Interval(-1, 1), kForwardPairs, 7, kForwardTol);
    bool exact_ok = r.exact == f.exact_capable();
    ok = ok && r.violations == 0 && r.pairs_tested == kForwardPairs && exact_ok;
    d << n << ":" << r.violations << (r.exact ? "(exact) " : "(float) ");
  }
  double s = seconds_since(t0);
  d << std::to_string(s) << " s (limit 30 s)";
  return {ok && s < kForwardTimeLimitS, d.str()};
}

// 3. Witnesses for non-convex pairs, confirmed at tol/10.
Outcome converse_witness() {
  std::ostringstream d;
  bool ok = true;
  for (const char* n : {"neg_square", "sin"}) {
    FuncDef f = builtin(n);
    Primitive F = *f.primitive();
    auto w = find_violation(f, F, Interval(0, 3), kWitnessBudget, 7, kWitnessTol);
    if (!w) {
      ok = false;
      d << n << ": no witness ";
      continue;
    }
    HHPairResult again = w->pair.exact ? hh_check_pair(f, F, w->pair.x, w->pair.y, kWitnessTol / 10)
                                       : hh_check_pair_float<long double>(f, F, w->pair.x, w->pair.y, kWitnessTol / 10);
    bool side_broken = w->side == HHSide::Left ? !again.left_holds : !again.right_holds;
    ok = ok && side_broken;
    d << n << ": (" << w->pair.x.to_double() << ", " << w->pair.y.to_double() << ") " << side_name(w->side)
      << (side_broken ? " confirmed " : " NOT confirmed ");
  }
  return {ok, d.str()};
}

// 4. Sandwich gap, telescoping and limit for (x^2, x^3/3) on [0, 1].
Outcome sandwich_convergence() {
  FuncDef f = builtin("square");
  SandwichReport s = sandwich(f, *f.primitive(), 0, 1, kDefaultMaxDepth, kSandwichTol);
  if (static_cast<int>(s.rows.size()) < kSandwichCheckedDepths)
    return {false, "only " + std::to_string(s.rows.size()) + " rows"};
  bool gap_ok = true;
  for (int d = 1; d <= kSandwichCheckedDepths; ++d)
    gap_ok = gap_ok && s.rows[d - 1].gap.value <= kSandwichGapConstant * std::pow(4.0, -(d - 1));
  bool constant = s.telescoping_exact;
  for (const auto& r : s.rows) constant = constant && r.delta_F.exact && *r.delta_F.exact == *s.rows[0].delta_F.exact;
  double err = std::abs(s.limit.value - 1.0 / 3);
  std::ostringstream d;
  d << "rows=" << s.rows.size() << " gap<=4^-(d-1):" << gap_ok << " delta_F constant:" << constant
    << " |limit-1/3|=" << err;
  return {gap_ok && constant && s.converged && err <= kSandwichLimitTol, d.str()};
}

// 5. Agreement with plain midpoint Riemann sums that do not touch the library.
double ordinary_riemann(const std::function<double(double)>& g) {
  long double s = 0;
  for (int i = 0; i < kOracleCells; ++i) s += g((i + 0.5) / kOracleCells);
  return static_cast<double>(s / kOracleCells);
}

Outcome oracle_equivalence() {
  struct Case {
    const char* name;
    std::function<double(double)> g;
  };
  const Case cases[] = {{"square", [](double x) { return x * x; }},
                        {"exp", [](double x) { return std::exp(x); }},
                        {"abs", [](double x) { return std::fabs(x); }}};
  IntegrateOptions o;
  o.tol = kOracleTol;
  o.field = KField::Rationals;
  bool ok = true;
  std::ostringstream d;
  for (const auto& c : cases) {
    double oracle = ordinary_riemann(c.g);
    double v = integrate(builtin(c.name), 0, 1, o).value.value;
    double diff = std::abs(v - oracle);
    ok = ok && diff <= kOracleTol;
    d << c.name << ":" << diff << " ";
  }
  return {ok, d.str()};
}

// 6. A support line integrates below its function.
Outcome monotonicity() {
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> uz(-0.95, 0.95);
  const char* names[] = {"square", "quartic", "abs", "exp", "relu"};
  IntegrateOptions o;
  double worst = -1e300;
  for (int i = 0; i < kMonotonePairs; ++i) {
    FuncDef f = builtin(names[rng() % 5]);
    double z = uz(rng);
    FuncDef g = support_line(f, z).as_function();
    double lhs = integrate(g, -1, 1, o).value.value, rhs = integrate(f, -1, 1, o).value.value;
    worst = std::max(worst, lhs - rhs);
  }
  std::ostringstream d;
  d << kMonotonePairs << " pairs, max(int g - int f) = " << worst;
  return {worst <= kMonotoneSlack, d.str()};
}

// 7. Interval additivity on random rational splits.
Outcome additivity() {
  struct Case {
    FuncDef f;
    Rational lo, hi;
  };
  std::vector<Case> suite{{builtin("square"), -1, 1},
                          {builtin("quartic"), -1, 1},
                          {builtin("exp"), -1, 1},
                          {builtin("neg_square"), -1, 1},
                          {builtin("sin").with_shape(Shape::Concave), 0, 3},
                          {builtin("affine"), -1, 1}};
  std::mt19937_64 rng(1007);
  int passed = 0, total = 0;
  bool affine_exact = true;
  for (const auto& c : suite) {
    for (int i = 0; i < kAdditivitySplits; ++i) {
      Rational w = c.hi - c.lo;
      auto draw = [&] { return c.lo + w * Rational(1 + static_cast<long long>(rng() % 999), 1000); };
      Rational a = draw(), g = draw(), b = draw();
      if (b < a) std::swap(a, b);
      if (g < a) std::swap(a, g);
      if (b < g) std::swap(g, b);
      if (!(a < g && g < b)) {
        --i;
        continue;
      }
      IntegrateOptions o;
      o.exact = c.f.affine().has_value();
      AdditivityReport r = interval_additivity_check(c.f, a, g, b, kAdditivityTol, o);
      ++total;
      passed += r.holds;
      if (c.f.affine()) affine_exact = affine_exact && r.exact && r.discrepancy.exact->is_zero();
    }
  }
  std::ostringstream d;
  d << passed << "/" << total << " splits, affine exact:" << affine_exact;
  return {passed == total && affine_exact, d.str()};
}

// 8. Derivative squeeze at seeded points and at the kink of |x|.
Outcome derivative_squeeze() {
  std::mt19937_64 rng(1008);
  auto hs = decimal_steps(6);
  int passed = 0, total = 0;
  std::string failures;
  for (const char* n : {"square", "quartic", "abs", "exp", "relu", "affine"}) {
    FuncDef f = builtin(n);
    Primitive F = *f.primitive();
    std::vector<Rational> xs;
    for (int i = 0; i < kDerivativePoints; ++i) xs.push_back(Rational(static_cast<long long>(rng() % 1801) - 900, 1000));
    if (std::string_view(n) == "abs" || std::string_view(n) == "relu") xs.emplace_back(0);
    for (const auto& x : xs) {
      ++total;
      if (derivative_check(f, F, x, hs, kDerivativeTol).holds) {
        ++passed;
      } else {
        failures += std::string(" ") + n + "@" + x.str();
      }
    }
  }
  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " points incl. kinks" + failures};
}

// 9. Byte-identical CLI output across two runs.
std::string shell(const std::string& cmd) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) return "<popen failed>";
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  return out;
}

Outcome determinism() {
  const std::string bin = HH_LAB_BINARY;
  const char* matrix[] = {
      "integrate --builtin exp --interval 0 1 --tol 1e-6",
      "integrate -f \"2*x+3\" --interval 1 5 --exact",
      "sums -f \"x^2\" --interval 0 1 --partition random:7:40:3 --exact",
      "sandwich --builtin square --interval 0 1 --exact",
      "hh-check --builtin exp --interval -1 1 --pairs 5000 --seed 11",
      "hh-check -f \"0-x^2\" -F \"0-x^3/3\" --interval 0 1 --seed 12",
      "convexity --builtin sin --interval 0 3 --seed 13",
      "violation --builtin sin --interval 0 3 --seed 14",
      "support-line --builtin abs --at 0",
      "reconstruct --builtin exp --base 0 --at 1/2 1 -1",
  };
  std::size_t same = 0, total = 0;
  for (const char* cmd : matrix) {
    std::string line = bin + " " + cmd + " 2>&1";
    std::string a = shell(line), b = shell(line);
    ++total;
    same += (!a.empty() && a == b && a.front() == '{');
  }
  return {same == total, std::to_string(same) + "/" + std::to_string(total) + " commands byte-identical"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"exact affine identity", affine_identity},
      {"forward Hermite-Hadamard on the convex suite", forward_hh},
      {"converse witnesses for -x^2 and sin", converse_witness},
      {"sandwich convergence for (x^2, x^3/3)", sandwich_convergence},
      {"integral agrees with ordinary Riemann sums", oracle_equivalence},
      {"monotonicity against support lines", monotonicity},
      {"interval additivity", additivity},
      {"derivative squeeze", derivative_squeeze},
      {"CLI determinism", determinism},
  };
  int failed = 0, index = 0;
  for (const auto& c : criteria) {
    ++index;
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s [%d] %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", index, c.name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed;
}
