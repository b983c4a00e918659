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

// Command-line front end. run() is the whole program minus process setup so
// tests can drive it in-process.

#include <algorithm>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convexity.hpp"
#include "hh.hpp"
#include "kriemann.hpp"
#include "parser.hpp"
#include "report.hpp"

namespace hhlab::cli {

enum ExitCode { kOk = 0, kFailed = 1, kUsage = 2 };

/// Flags of one invocation. Defaults depend on the subcommand.
struct RunConfig {
  std::string f;
  std::string F;
  std::string builtin;
  std::vector<std::string> interval{"0", "1"};
  std::string field = "q";
  std::string strategy = "auto";
  std::string shape = "auto";
  double tol = 1e-6;
  int depth = kDefaultMaxDepth;
  long long pairs = 10000;
  std::uint64_t seed = 1;
  bool exact = false;
  std::string out = "json";
  std::string partition = "uniform:8";
  std::string kind = "all";
  long long max_den = 12;
  double h0 = 1e-2;
  std::string base = "0";
  std::vector<std::string> at;

  json to_json(const std::string& command) const {
    json j;
    j["f"] = f;
    if (!F.empty()) j["F"] = F;
    if (!builtin.empty()) j["builtin"] = builtin;
    j["interval"] = interval;
    j["field"] = field;
    j["out"] = out;
    if (command == "integrate" || command == "sums" || command == "reconstruct") {
      j["strategy"] = strategy;
      j["shape"] = shape;
      j["exact"] = exact;
    }
    if (command == "integrate" || command == "sandwich" || command == "convexity" || command == "reconstruct")
      j["depth"] = depth;
    if (command != "sums") j["tol"] = tol;
    if (command == "sums") j["partition"] = partition;
    if (command == "sandwich") j["exact"] = exact;
    if (command == "hh-check" || command == "violation" || command == "convexity") {
      j["pairs"] = pairs;
      j["seed"] = seed;
    }
    if (command == "convexity") {
      j["kind"] = kind;
      j["max_den"] = max_den;
    }
    if (command == "support-line") j["h0"] = h0;
    if (command == "reconstruct") j["base"] = base;
    if (command == "support-line" || command == "reconstruct") j["at"] = at;
    return j;
  }
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline const char* kFooter =
    "Expressions: numbers, x, + - * / ^ (non-negative integer exponents), parentheses and\n"
    "exp log sin cos abs max min. An integer literal followed by /integer is one rational\n"
    "literal, so x/2/3 is x/(2/3). Write negative values by subtraction or parentheses,\n"
    "e.g. \"0-x^2\" or \"(0-1)*x\", so the shell argument does not look like a flag.\n"
    "HH_LAB_THREADS caps the worker count.";

struct Functions {
  FuncDef f;
  std::optional<Primitive> F;
};

inline Interval parse_interval(const RunConfig& c) {
  if (c.interval.size() != 2) throw UsageError("--interval takes two endpoints");
  Rational a = Rational::parse(c.interval[0]), b = Rational::parse(c.interval[1]);
  if (!(a < b)) throw UsageError("--interval needs a < b, got " + c.interval[0] + " " + c.interval[1]);
  return Interval(a, b);
}

inline KField parse_field(const std::string& s) {
  if (s == "q" || s == "Q") return KField::Rationals;
  if (s == "r" || s == "R") return KField::Reals;
  throw UsageError("--field must be q or r");
}

inline Functions load_functions(const RunConfig& c, bool need_primitive) {
  std::optional<FuncDef> f;
  std::optional<Primitive> F;
  if (!c.builtin.empty()) {
    f = find_builtin(c.builtin);
    if (!f) throw UsageError("unknown builtin '" + c.builtin + "'");
    if (auto p = f->primitive()) F = Primitive(*p);
  }
  if (!c.f.empty()) f = FuncDef::parse("f", c.f);
  if (!f) throw UsageError("a function is required (-f EXPR or --builtin NAME)");
  if (!c.F.empty()) F = Primitive(FuncDef::parse("F", c.F));
  if (need_primitive && !F) throw UsageError("a primitive is required (-F EXPR)");
  return {*f, F};
}

inline FuncDef apply_shape(const FuncDef& f, const RunConfig& c, const Interval& d) {
  if (c.shape == "auto") {
    if (f.declared_shape() != Shape::Unknown) return f;
    return f.with_shape(classify_shape(f, d, c.seed));
  }
  auto s = shape_from_name(c.shape);
  if (!s) throw UsageError("--shape must be convex, concave, affine, unknown or auto");
  return f.with_shape(*s);
}

inline BoundStrategy parse_strategy(const std::string& s, const FuncDef& f) {
  if (s == "auto") {
    if (f.affine() || f.declared_shape() != Shape::Unknown) return BoundStrategy::endpoint_convex();
    return BoundStrategy::dense_sample(64);
  }
  if (s == "endpoint") return BoundStrategy::endpoint_convex();
  if (s == "oracle") {
    Expr body = f.body();
    return BoundStrategy::user_oracle([body](const Rational& lo, const Rational& hi) {
      Bounds b = eval_bounds(body, lo.to_double(), hi.to_double());
      return CellBounds{b.lo, b.hi};
    });
  }
  if (s.rfind("dense:", 0) == 0) {
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(s.substr(6), &used);
      if (used != s.size() - 6) n = 0;
    } catch (const std::exception&) {
      n = 0;
    }
    if (n < 2) throw UsageError("--strategy dense:N needs an integer N >= 2");
    return BoundStrategy::dense_sample(n);
  }
  throw UsageError("--strategy must be auto, endpoint, dense:N or oracle");
}

inline long long parse_count(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw UsageError("bad " + what + " '" + s + "'");
  return v;
}

inline KPartition parse_partition(const std::string& spec, const Interval& d, KField field) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string t; std::getline(ss, t, ':');) parts.push_back(t);
  if (parts.size() == 2 && parts[0] == "uniform") {
    long long n = parse_count(parts[1], "cell count");
    if (n < 1) throw UsageError("uniform partitions need at least one cell");
    return uniform(d.lo, d.hi, static_cast<std::uint64_t>(n), field);
  }
  if (parts.size() == 2 && parts[0] == "dyadic") return dyadic(d.lo, d.hi, static_cast<int>(parse_count(parts[1], "depth")), field);
  if (parts.size() == 2 && parts[0] == "farey") {
    if (field != KField::Rationals) throw UsageError("farey partitions are rational");
    return farey(d.lo, d.hi, parse_count(parts[1], "order"));
  }
  if (parts.size() == 4 && parts[0] == "random") {
    if (field != KField::Rationals) throw UsageError("random rational partitions are rational");
    return random_rational(d.lo, d.hi, parse_count(parts[1], "cell count"), parse_count(parts[2], "denominator"),
                           static_cast<std::uint64_t>(parse_count(parts[3], "seed")));
  }
  throw UsageError("--partition must be uniform:N, dyadic:D, farey:Q or random:N:MAXDEN:SEED");
}

inline void require_positive_tol(const RunConfig& c) {
  if (!(c.tol > 0)) throw UsageError("--tol must be positive");
}

inline void emit_json(std::ostream& out, const std::string& command, const RunConfig& c, json result) {
  json doc;
  doc["command"] = command;
  doc["config"] = c.to_json(command);
  doc["result"] = std::move(result);
  out << doc.dump(2) << '\n';
}

// One "key: value" line per scalar member of the result.
inline void emit_plain(std::ostream& out, const std::string& command, const json& result) {
  out << command << '\n';
  for (const auto& [k, v] : result.items())
    if (!v.is_structured()) out << "  " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
}

struct Outcome {
  int code = kOk;
  json result;
  std::function<void(std::ostream&)> csv;  // empty when CSV is not offered
};

inline Outcome cmd_integrate(const RunConfig& c) {
  require_positive_tol(c);
  Interval d = parse_interval(c);
  FuncDef f = apply_shape(load_functions(c, false).f, c, d);
  IntegrateOptions o;
  o.tol = c.tol;
  o.schedule = dyadic_schedule(c.depth);
  o.strategy = parse_strategy(c.strategy, f);
  o.field = parse_field(c.field);
  o.exact = c.exact;
  IntegralEstimate e = integrate(f, d.lo, d.hi, o);
  Outcome r{e.converged ? kOk : kFailed, to_json(e), {}};
  r.result["shape"] = std::string(shape_name(f.declared_shape()));
  r.csv = [e](std::ostream& os) { write_trace_csv(os, e); };
  return r;
}

inline Outcome cmd_sums(const RunConfig& c) {
  Interval d = parse_interval(c);
  FuncDef f = apply_shape(load_functions(c, false).f, c, d);
  KPartition p = parse_partition(c.partition, d, parse_field(c.field));
  Arithmetic mode = c.exact ? Arithmetic::Exact : Arithmetic::Float;
  SumReport s = darboux_sums(f, p, parse_strategy(c.strategy, f), mode);
  json j = to_json(s);
  json tagged;
  for (TagRule t : {TagRule::Left, TagRule::Right, TagRule::Midpoint}) put(tagged, std::string(tag_rule_name(t)), tagged_sum(f, p, t, mode));
  j["tagged"] = std::move(tagged);
  Outcome r{kOk, j, {}};
  r.csv = [s](std::ostream& os) {
    os << "partition,cells,lower,upper,trapezoid\n"
       << s.partition.label() << ',' << s.partition.cells() << ',' << csv_number(s.lower.value) << ','
       << csv_number(s.upper.value) << ',' << csv_number(s.trapezoid.value) << '\n';
  };
  return r;
}

inline Outcome cmd_sandwich(const RunConfig& c) {
  require_positive_tol(c);
  Interval d = parse_interval(c);
  Functions fs = load_functions(c, true);
  SandwichReport s = sandwich(fs.f, *fs.F, d.lo, d.hi, c.depth, c.tol, c.exact);
  bool ok = s.converged && !s.first_broken_depth && s.telescoping_holds;
  Outcome r{ok ? kOk : kFailed, to_json(s), {}};
  r.csv = [s](std::ostream& os) { write_sandwich_csv(os, s); };
  return r;
}

inline Outcome cmd_hh_check(const RunConfig& c) {
  require_positive_tol(c);
  if (c.pairs < 1) throw UsageError("--pairs must be at least 1");
  Interval d = parse_interval(c);
  Functions fs = load_functions(c, true);
  HHScanReport s = hh_scan(fs.f, *fs.F, d, static_cast<std::size_t>(c.pairs), c.seed, c.tol);
  return {s.passed() ? kOk : kFailed, to_json(s), {}};
}

inline Outcome cmd_convexity(const RunConfig& c) {
  require_positive_tol(c);
  if (c.pairs < 1) throw UsageError("--pairs must be at least 1");
  Interval d = parse_interval(c);
  FuncDef f = load_functions(c, false).f;
  std::vector<ConvexityReport> reps;
  bool all = c.kind == "all";
  if (!all && c.kind != "jensen" && c.kind != "k-convex" && c.kind != "second-difference")
    throw UsageError("--kind must be jensen, k-convex, second-difference or all");
  if (all || c.kind == "jensen") reps.push_back(jensen_check(f, d, static_cast<std::size_t>(c.pairs), c.seed, c.tol));
  if (all || c.kind == "k-convex")
    reps.push_back(k_convex_check(f, d, static_cast<std::size_t>(c.pairs), c.max_den, c.seed, c.tol));
  if (all || c.kind == "second-difference")
    reps.push_back(second_difference_check(f, dyadic(d.lo, d.hi, c.depth), c.tol));
  json checks = json::array();
  bool refuted = false;
  for (const auto& r : reps) {
    checks.push_back(to_json(r));
    refuted = refuted || r.verdict == Verdict::Counterexample;
  }
  json j;
  j["checks"] = std::move(checks);
  j["verdict"] = std::string(verdict_name(refuted ? Verdict::Counterexample : Verdict::NoViolationFound));
  return {refuted ? kFailed : kOk, j, {}};
}

inline Outcome cmd_violation(const RunConfig& c) {
  require_positive_tol(c);
  if (c.pairs < 1) throw UsageError("--pairs must be at least 1");
  Interval d = parse_interval(c);
  Functions fs = load_functions(c, true);
  auto w = find_violation(fs.f, *fs.F, d, static_cast<std::size_t>(c.pairs), c.seed, c.tol);
  json j;
  j["found"] = w.has_value();
  j["witness"] = w ? to_json(*w) : json(nullptr);
  j["budget"] = c.pairs;
  return {w ? kFailed : kOk, j, {}};
}

inline Outcome cmd_support_line(const RunConfig& c) {
  require_positive_tol(c);
  if (c.at.size() != 1) throw UsageError("support-line takes exactly one --at point");
  FuncDef f = load_functions(c, false).f;
  double z = Rational::parse(c.at[0]).to_double();
  json j;
  try {
    SupportLine s = support_line(f, z, c.h0, c.tol);
    j = to_json(s);
    j["supported"] = true;
    return {kOk, j, {}};
  } catch (const NoSupportError& e) {
    j["z"] = z;
    j["supported"] = false;
    j["reason"] = e.what();
    return {kFailed, j, {}};
  }
}

inline Outcome cmd_reconstruct(const RunConfig& c) {
  require_positive_tol(c);
  if (c.at.empty()) throw UsageError("reconstruct needs at least one --at point");
  std::vector<Rational> xs;
  for (const auto& s : c.at) xs.push_back(Rational::parse(s));
  Rational base = Rational::parse(c.base);
  Rational lo = std::min(base, *std::min_element(xs.begin(), xs.end()));
  Rational hi = std::max(base, *std::max_element(xs.begin(), xs.end()));
  FuncDef f = load_functions(c, false).f;
  if (lo < hi) f = apply_shape(f, c, Interval(lo, hi));
  IntegrateOptions o;
  o.schedule = dyadic_schedule(c.depth);
  o.strategy = parse_strategy(c.strategy, f);
  o.field = parse_field(c.field);
  o.exact = c.exact;
  auto pts = reconstruct_primitive(f, base, xs, c.tol, o);
  json arr = json::array();
  bool all_converged = true;
  for (const auto& p : pts) {
    arr.push_back(to_json(p));
    all_converged = all_converged && p.converged;
  }
  json j;
  j["base"] = c.base;
  j["points"] = std::move(arr);
  j["all_converged"] = all_converged;
  Outcome r{all_converged ? kOk : kFailed, j, {}};
  r.csv = [pts](std::ostream& os) {
    os << "x,F,converged\n";
    for (const auto& p : pts) os << p.x.str() << ',' << csv_number(p.value.value) << ',' << (p.converged ? 1 : 0) << '\n';
  };
  return r;
}

}  // namespace detail

/// Parses args (without the program name), runs one subcommand and writes the
/// report to out and diagnostics to err. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"K-Riemann integration and Hermite-Hadamard verification", "hh_lab"};
  app.footer(kFooter);
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    Outcome (*fn)(const RunConfig&);
    double tol;
    int depth;
    long long pairs;
  };
  const Command commands[] = {
      {"integrate", "bracket the K-integral of f over --interval", cmd_integrate, 1e-6, kDefaultMaxDepth, 0},
      {"sums", "upper, lower, tagged and trapezoid sums on one partition", cmd_sums, 1e-6, 0, 0},
      {"sandwich", "midpoint/telescoping/trapezoid rows on dyadic refinements", cmd_sandwich, 1e-9, kDefaultMaxDepth, 0},
      {"hh-check", "scan the Hermite-Hadamard system over pairs", cmd_hh_check, 1e-12, 0, 10000},
      {"convexity", "Jensen, K-convexity and second-difference checks", cmd_convexity, 1e-12, 6, 1000},
      {"violation", "search for a pair violating the Hermite-Hadamard system", cmd_violation, 1e-12, 0, 10000},
      {"support-line", "numeric supporting line of f at --at", cmd_support_line, 1e-8, 0, 0},
      {"reconstruct", "rebuild F from f by integration from --base", cmd_reconstruct, 1e-6, kDefaultMaxDepth, 0},
  };
  std::map<std::string, RunConfig> configs;
  std::map<std::string, const Command*> by_name;
  for (const Command& s : commands) {
    RunConfig& c = configs[s.name];
    c.tol = s.tol;
    if (s.depth) c.depth = s.depth;
    if (s.pairs) c.pairs = s.pairs;
    by_name[s.name] = &s;
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("-f,--function", c.f, "function body");
    sub->add_option("-F,--primitive", c.F, "primitive (antiderivative) body");
    sub->add_option("--builtin", c.builtin, "builtin function name (sets f and F)");
    sub->add_option("--interval", c.interval, "endpoints A B as rational text")->expected(2);
    sub->add_option("--field", c.field, "partition coefficient field q|r");
    sub->add_option("--strategy", c.strategy, "auto|endpoint|dense:N|oracle");
    sub->add_option("--shape", c.shape, "convex|concave|affine|unknown|auto");
    sub->add_option("--tol", c.tol, "tolerance");
    sub->add_option("--depth", c.depth, "dyadic depth");
    sub->add_option("--pairs", c.pairs, "number of pairs (budget)");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_flag("--exact", c.exact, "exact rational arithmetic where possible");
    sub->add_option("--out", c.out, "json|csv|plain")->check(CLI::IsMember({"json", "csv", "plain"}));
    sub->add_option("--partition", c.partition, "uniform:N|dyadic:D|farey:Q|random:N:MAXDEN:SEED");
    sub->add_option("--kind", c.kind, "jensen|k-convex|second-difference|all");
    sub->add_option("--max-den", c.max_den, "largest weight denominator");
    sub->add_option("--h0", c.h0, "initial step for one-sided derivatives");
    sub->add_option("--base", c.base, "base point with F(base) = 0");
    sub->add_option("--at", c.at, "evaluation point(s)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string name = chosen->get_name();
  const RunConfig& c = configs[name];
  try {
    Outcome o = by_name[name]->fn(c);
    if (c.out == "csv") {
      if (!o.csv) throw UsageError("csv output is offered by integrate, sums, sandwich and reconstruct");
      o.csv(out);
    } else if (c.out == "plain") {
      emit_plain(out, name, o.result);
    } else {
      emit_json(out, name, c, std::move(o.result));
    }
    return o.code;
  } catch (const hhlab::ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::logic_error& e) {
    err << "error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kUsage;
}

}  // namespace hhlab::cli
