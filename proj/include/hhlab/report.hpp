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

// JSON and CSV serialization of reports. JSON numbers are IEEE doubles; a
// value that is known exactly also carries its "p/q" text under key + "_exact".

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "convexity.hpp"
#include "hh.hpp"
#include "kriemann.hpp"

namespace hhlab {

using json = nlohmann::json;

inline json number_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline void put(json& j, const std::string& key, const Number& n) {
  j[key] = number_json(n.value);
  if (n.exact) j[key + "_exact"] = n.exact->str();
}

inline void to_json(json& j, const Rational& r) { j = r.str(); }
inline void from_json(const json& j, Rational& r) {
  if (j.is_number_integer()) {
    r = Rational(j.get<long long>());
  } else {
    r = Rational::parse(j.get<std::string>());
  }
}

/// {"a", "b", "field", "label", "cells"} plus "alphas" unless the partition is
/// a large lazy uniform grid, which the label then describes.
inline constexpr std::size_t kMaxSerializedCells = 1024;

inline void to_json(json& j, const KPartition& p) {
  j = json::object();
  j["a"] = p.a();
  j["b"] = p.b();
  j["field"] = field_name(p.field());
  j["label"] = p.label();
  j["cells"] = p.cells();
  if (!p.is_uniform() || p.cells() <= kMaxSerializedCells) {
    json alphas = json::array();
    for (const auto& a : p.alphas()) alphas.push_back(a.str());
    j["alphas"] = std::move(alphas);
  }
}

inline KPartition partition_from_json(const json& j) {
  Rational a = j.at("a").get<Rational>(), b = j.at("b").get<Rational>();
  std::string field = j.value("field", std::string("Q"));
  if (field != "Q" && field != "R") throw std::invalid_argument("partition field must be \"Q\" or \"R\"");
  KField k = field == "Q" ? KField::Rationals : KField::Reals;
  std::string label = j.value("label", std::string());
  if (j.contains("alphas")) {
    std::vector<Rational> alphas;
    for (const auto& x : j.at("alphas")) alphas.push_back(x.get<Rational>());
    return KPartition(a, b, std::move(alphas), k, label);
  }
  auto colon = label.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("partition JSON needs alphas or a grid label");
  std::string kind = label.substr(0, colon);
  long long n = std::stoll(label.substr(colon + 1));
  if (kind == "uniform") return uniform(a, b, static_cast<std::uint64_t>(n), k);
  if (kind == "dyadic") return dyadic(a, b, static_cast<int>(n), k);
  throw std::invalid_argument("cannot rebuild partition from label '" + label + "'");
}

inline json to_json(const SumReport& s) {
  json j;
  j["partition"] = s.partition;
  put(j, "lower", s.lower);
  put(j, "upper", s.upper);
  put(j, "trapezoid", s.trapezoid);
  put(j, "global_inf", s.global_inf);
  put(j, "global_sup", s.global_sup);
  j["strategy"] = s.strategy;
  j["shape"] = std::string(shape_name(s.shape));
  j["exact"] = s.exact;
  return j;
}

inline json to_json(const TraceRow& r) {
  json j;
  j["depth"] = r.depth;
  j["partition"] = r.partition;
  j["cells"] = r.cells;
  put(j, "lower", r.lower);
  put(j, "upper", r.upper);
  put(j, "midpoint", r.midpoint);
  put(j, "trapezoid", r.trapezoid);
  return j;
}

inline json to_json(const IntegralEstimate& e) {
  json j;
  put(j, "value", e.value);
  put(j, "lower", e.lower);
  put(j, "upper", e.upper);
  j["width"] = number_json(e.width());
  j["converged"] = e.converged;
  j["exact"] = e.exact;
  j["closed_form"] = e.closed_form;
  j["bracket_crossed"] = e.bracket_crossed;
  j["tolerance"] = e.tolerance;
  j["strategy"] = e.strategy;
  j["schedule"] = e.schedule;
  json trace = json::array();
  for (const auto& r : e.trace) trace.push_back(to_json(r));
  j["trace"] = std::move(trace);
  return j;
}

inline json to_json(const HHPairResult& r) {
  json j;
  j["x"] = r.x;
  j["y"] = r.y;
  put(j, "midpoint_value", r.midpoint_value);
  put(j, "difference_quotient", r.difference_quotient);
  put(j, "endpoint_average", r.endpoint_average);
  j["left_holds"] = r.left_holds;
  j["right_holds"] = r.right_holds;
  j["tol"] = r.tol;
  j["exact"] = r.exact;
  return j;
}

inline json to_json(const HHScanReport& r) {
  json j;
  j["pairs_tested"] = r.pairs_tested;
  j["violations"] = r.violations;
  j["left_violations"] = r.left_violations;
  j["right_violations"] = r.right_violations;
  j["first_violation"] = r.first_violation ? to_json(*r.first_violation) : json(nullptr);
  j["seed"] = r.seed;
  j["tol"] = r.tol;
  j["exact"] = r.exact;
  j["f"] = r.f_provenance;
  j["F"] = r.F_provenance;
  j["passed"] = r.passed();
  return j;
}

inline json to_json(const SandwichRow& r) {
  json j;
  j["depth"] = r.depth;
  j["n_cells"] = r.cells;
  put(j, "midpoint_sum", r.midpoint_sum);
  put(j, "delta_F", r.delta_F);
  put(j, "trapezoid_sum", r.trapezoid_sum);
  put(j, "gap", r.gap);
  j["left_holds"] = r.left_holds;
  j["right_holds"] = r.right_holds;
  return j;
}

inline json to_json(const SandwichReport& s) {
  json j;
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back(to_json(r));
  j["rows"] = std::move(rows);
  j["converged"] = s.converged;
  put(j, "limit", s.limit);
  put(j, "total", s.total);
  j["telescoping_exact"] = s.telescoping_exact;
  j["telescoping_holds"] = s.telescoping_holds;
  j["exact"] = s.exact;
  j["tol"] = s.tol;
  j["first_broken_depth"] = s.first_broken_depth ? json(*s.first_broken_depth) : json(nullptr);
  j["first_broken_side"] = s.first_broken_side ? json(std::string(side_name(*s.first_broken_side))) : json(nullptr);
  return j;
}

inline json to_json(const ConvexityReport& r) {
  json j;
  j["check"] = r.check;
  j["verdict"] = std::string(verdict_name(r.verdict));
  if (r.witness) {
    json w;
    w["x"] = r.witness->x;
    w["y"] = r.witness->y;
    w["lambda"] = r.witness->lambda;
    put(w, "lhs", r.witness->lhs);
    put(w, "rhs", r.witness->rhs);
    j["witness"] = std::move(w);
  } else {
    j["witness"] = nullptr;
  }
  j["pairs_tested"] = r.pairs_tested;
  j["seed"] = r.seed;
  j["tol"] = r.tol;
  j["exact"] = r.exact;
  return j;
}

inline json to_json(const ViolationWitness& w) {
  json j;
  j["x"] = w.pair.x;
  j["y"] = w.pair.y;
  j["side"] = std::string(side_name(w.side));
  put(j, "lhs", w.lhs);
  put(j, "rhs", w.rhs);
  j["pair"] = to_json(w.pair);
  return j;
}

inline json to_json(const SupportLine& s) {
  json j;
  j["z"] = s.z;
  j["slope"] = s.slope;
  j["intercept"] = s.intercept;
  j["d_minus"] = s.d_minus;
  j["d_plus"] = s.d_plus;
  return j;
}

inline json to_json(const ReconstructedPoint& p) {
  json j;
  j["x"] = p.x;
  put(j, "F", p.value);
  j["converged"] = p.converged;
  j["width"] = p.width;
  return j;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// depth,lower,upper,midpoint,trapezoid
inline void write_trace_csv(std::ostream& os, const IntegralEstimate& e) {
  os << "depth,lower,upper,midpoint,trapezoid\n";
  for (const auto& r : e.trace)
    os << r.depth << ',' << csv_number(r.lower.value) << ',' << csv_number(r.upper.value) << ','
       << csv_number(r.midpoint.value) << ',' << csv_number(r.trapezoid.value) << '\n';
}

/// depth,n_cells,midpoint_sum,delta_F,trapezoid_sum,gap
inline void write_sandwich_csv(std::ostream& os, const SandwichReport& s) {
  os << "depth,n_cells,midpoint_sum,delta_F,trapezoid_sum,gap\n";
  for (const auto& r : s.rows)
    os << r.depth << ',' << r.cells << ',' << csv_number(r.midpoint_sum.value) << ',' << csv_number(r.delta_F.value)
       << ',' << csv_number(r.trapezoid_sum.value) << ',' << csv_number(r.gap.value) << '\n';
}

}  // namespace hhlab
