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

#include <set>
#include <stdexcept>
#include <string>

namespace hhlab {

/// Exact arithmetic failure (division by zero on Rationals).
struct ArithmeticError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A function was evaluated outside the set where it is defined
/// (log of a non-positive value, division by zero in float mode).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A bound strategy was requested for a function it is not valid for.
struct StrategyMisuse : std::logic_error {
  using std::logic_error::logic_error;
};

/// No affine minorant touching f at the requested point was found.
struct NoSupportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ParseError : public std::invalid_argument {
 public:
  ParseError(std::size_t offset, std::set<std::string> expected, const std::string& what)
      : std::invalid_argument(format(offset, expected, what)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::set<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string format(std::size_t offset, const std::set<std::string>& expected,
                            const std::string& what) {
    std::string msg = "syntax error at offset " + std::to_string(offset) + ": " + what;
    if (!expected.empty()) {
      msg += " (expected one of:";
      for (const auto& e : expected) msg += " " + e;
      msg += ")";
    }
    return msg;
  }

  std::size_t offset_;
  std::set<std::string> expected_;
};

}  // namespace hhlab
