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

#include <array>
#include <cstdio>
#include <memory>
#include <sstream>

#include "hhlab/cli.hpp"

namespace hhlab {
namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string shell(const std::string& cmd, int* status) {
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  *status = pclose(pipe.release());
  return out;
}

TEST(Cli, HHCheckForward) {
  CliRun r = run({"hh-check", "-f", "x^2", "-F", "x^3/3", "--interval", "0", "1", "--pairs", "1000"});
  ASSERT_EQ(r.code, 0) << r.err;
  json d = r.doc();
  EXPECT_EQ(d["command"], "hh-check");
  EXPECT_EQ(d["result"]["violations"], 0);
  EXPECT_EQ(d["result"]["pairs_tested"], 1000);
  EXPECT_EQ(d["config"]["pairs"], 1000);
  EXPECT_EQ(d["config"]["interval"], json::array({"0", "1"}));
}

TEST(Cli, HHCheckConcaveFails) {
  CliRun r = run({"hh-check", "-f", "0-x^2", "-F", "0-x^3/3", "--interval", "0", "1"});
  EXPECT_EQ(r.code, 1);
  json w = r.doc()["result"]["first_violation"];
  ASSERT_FALSE(w.is_null());
  EXPECT_FALSE(w["left_holds"].get<bool>() && w["right_holds"].get<bool>());
}

TEST(Cli, IntegrateAffineExact) {
  CliRun r = run({"integrate", "-f", "2*x+3", "--interval", "1", "5", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  json res = r.doc()["result"];
  EXPECT_EQ(res["value_exact"], "36/1");
  EXPECT_EQ(res["exact"], true);
  EXPECT_EQ(res["converged"], true);
}

TEST(Cli, IntegrateTraceCsv) {
  CliRun r = run({"integrate", "--builtin", "square", "--interval", "0", "1", "--tol", "1e-3", "--out", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "depth,lower,upper,midpoint,trapezoid");
  // Dyadic depth 1 has two cells: lower 1/8, upper 5/8.
  EXPECT_NE(r.out.find("\n1,0.125,0.625,0.375,0.375\n"), std::string::npos) << r.out;
}

TEST(Cli, Sums) {
  CliRun r = run({"sums", "-f", "x^2", "--interval", "0", "1", "--partition", "uniform:2", "--exact"});
  ASSERT_EQ(r.code, 0) << r.err;
  json res = r.doc()["result"];
  EXPECT_EQ(res["upper_exact"], "5/8");
  EXPECT_EQ(res["lower_exact"], "1/8");
  EXPECT_EQ(res["trapezoid_exact"], "3/8");
  EXPECT_EQ(res["tagged"]["midpoint_exact"], "5/16");
  EXPECT_EQ(res["partition"]["alphas"], json::array({"0/1", "1/2", "1/1"}));
  EXPECT_EQ(partition_from_json(res["partition"]), uniform(0, 1, 2));
}

TEST(Cli, SandwichCsv) {
  CliRun r = run({"sandwich", "--builtin", "square", "--interval", "0", "1", "--exact", "--out", "csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::string header, row1;
  std::getline(is, header);
  std::getline(is, row1);
  EXPECT_EQ(header, "depth,n_cells,midpoint_sum,delta_F,trapezoid_sum,gap");
  EXPECT_EQ(row1, "1,1,0.25,0.33333333333333331,0.5,0.25");
}

TEST(Cli, SandwichConcaveFails) {
  CliRun r = run({"sandwich", "--builtin", "neg_square", "--interval", "0", "1", "--depth", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.doc()["result"]["first_broken_side"], "left");
}

TEST(Cli, ConvexityAndViolation) {
  EXPECT_EQ(run({"convexity", "-f", "x^4", "--interval", "-1", "1"}).code, 0);
  CliRun c = run({"convexity", "--builtin", "sin", "--interval", "0", "3", "--kind", "jensen"});
  EXPECT_EQ(c.code, 1);
  EXPECT_EQ(c.doc()["result"]["checks"][0]["verdict"], "counterexample");
  CliRun v = run({"violation", "--builtin", "neg_square", "--interval", "0", "1", "--pairs", "100"});
  EXPECT_EQ(v.code, 1);
  EXPECT_EQ(v.doc()["result"]["witness"]["side"], "left");
  EXPECT_EQ(run({"violation", "--builtin", "square", "--interval", "-1", "1", "--pairs", "2000"}).code, 0);
}

TEST(Cli, SupportLine) {
  CliRun r = run({"support-line", "-f", "x^2", "--at", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(r.doc()["result"]["slope"].get<double>(), 2.0, 1e-8);
  CliRun n = run({"support-line", "-f", "0-x^2", "--at", "0"});
  EXPECT_EQ(n.code, 1);
  EXPECT_EQ(n.doc()["result"]["supported"], false);
}

TEST(Cli, Reconstruct) {
  CliRun r = run({"reconstruct", "-f", "x^2", "--base", "0", "--at", "1/2", "1", "--tol", "1e-6"});
  ASSERT_EQ(r.code, 0) << r.err;
  json pts = r.doc()["result"]["points"];
  ASSERT_EQ(pts.size(), 2u);
  EXPECT_NEAR(pts[0]["F"].get<double>(), 1.0 / 24, 1e-6);
  EXPECT_NEAR(pts[1]["F"].get<double>(), 1.0 / 3, 1e-6);
}

TEST(Cli, UsageErrors) {
  CliRun bad = run({"integrate", "-f", "x + * 2", "--interval", "0", "1"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("offset 4"), std::string::npos) << bad.err;
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"integrate", "-f", "x", "--interval", "1", "1"}).code, 2);
  EXPECT_EQ(run({"integrate", "-f", "x", "--interval", "0"}).code, 2);
  EXPECT_EQ(run({"integrate", "-f", "x", "--tol", "0"}).code, 2);
  EXPECT_EQ(run({"integrate", "-f", "x", "--strategy", "dense:1"}).code, 2);
  EXPECT_EQ(run({"integrate", "-f", "x", "--out", "xml"}).code, 2);
  EXPECT_EQ(run({"hh-check", "-f", "x^2", "--interval", "0", "1"}).code, 2);  // no primitive
  EXPECT_EQ(run({"integrate", "-f", "sin(x)", "--strategy", "endpoint", "--shape", "unknown"}).code, 2);
  EXPECT_EQ(run({"hh-check", "--builtin", "square", "--out", "csv"}).code, 2);
  EXPECT_EQ(run({"integrate", "--help"}).code, 0);
}

TEST(Cli, NonConvergenceExitsOne) {
  CliRun r = run({"integrate", "--builtin", "square", "--interval", "0", "1", "--tol", "1e-12", "--depth", "5"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.doc()["result"]["converged"], false);
}

TEST(Cli, BinaryIsDeterministic) {
  const std::string cmd = std::string(HH_LAB_BINARY) +
                          " hh-check --builtin exp --interval -1 1 --pairs 3000 --seed 42";
  int s1 = 0, s2 = 0;
  std::string a = shell(cmd, &s1), b = shell(cmd, &s2);
  EXPECT_EQ(s1, 0);
  EXPECT_EQ(s1, s2);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  std::string c = shell(std::string(HH_LAB_BINARY) + " hh-check --builtin exp --interval -1 1 --pairs 3000 --seed 43", &s1);
  EXPECT_EQ(json::parse(c)["config"]["seed"], 43);
}

}  // namespace
}  // namespace hhlab
