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

#ifndef ACCMFG_PDHG_HPP
#define ACCMFG_PDHG_HPP

#include "accmfg/ergodic_lp.hpp"

namespace accmfg {

/// Large-scale route for the ergodic LP: matrix-free primal-dual hybrid
/// gradient with ergodic-average iterates, a relative-value dual bound, and
/// final feasibility polishing (exact simplex on the support closure).
ErgodicSolution solve_ergodic_pdhg(const CostField& F,
                                   const TransitionKernel& kernel, double tol,
                                   const ErgodicLPOptions& options);

}  // namespace accmfg

#endif  // ACCMFG_PDHG_HPP
