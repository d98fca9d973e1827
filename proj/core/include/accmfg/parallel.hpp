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

#ifndef ACCMFG_PARALLEL_HPP
#define ACCMFG_PARALLEL_HPP

#include <functional>

namespace accmfg {

/// Worker count for node-parallel sweeps (pure Jacobi updates, so results
/// are bitwise identical for any count). Defaults to 1.
void set_worker_count(int n);
int worker_count();

/// Runs fn(begin, end) over disjoint chunks of [begin, end).
void parallel_for(int begin, int end,
                  const std::function<void(int, int)>& fn);

}  // namespace accmfg

#endif  // ACCMFG_PARALLEL_HPP
