// Copyright 2026 The accmfg Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "accmfg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace accmfg {

namespace {
std::atomic<int> g_workers{1};
}

void set_worker_count(int n) { g_workers.store(std::max(1, n)); }
int worker_count() { return g_workers.load(); }

void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& fn) {
  const int n = end - begin;
  const int workers = std::min(worker_count(), std::max(1, n));
  if (workers == 1 || n < 256) {
    fn(begin, end);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    int lo = begin + t * chunk;
    int hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& th : threads) th.join();
}

}  // namespace accmfg
