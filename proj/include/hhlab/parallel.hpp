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

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace hhlab::detail {

/// Worker count: HH_LAB_THREADS when set to a positive integer, otherwise the
/// hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("HH_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks write to
/// disjoint outputs, so results do not depend on the worker count. The first
/// exception in chunk order is rethrown.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                         std::size_t min_parallel = 1 << 14) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < min_parallel) {
    body(0, n);
    return;
  }
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n / (min_parallel / 4) + 1));
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t begin = std::min(n, w * chunk), end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hhlab::detail
