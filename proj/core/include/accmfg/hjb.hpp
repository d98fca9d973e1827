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

#ifndef ACCMFG_HJB_HPP
#define ACCMFG_HJB_HPP

#include <functional>
#include <vector>

#include "accmfg/costs.hpp"
#include "accmfg/fields.hpp"
#include "accmfg/phase_grid.hpp"

namespace accmfg {

/// Grid solvers for the kinetic Hamilton-Jacobi equation of acceleration
/// control. All three solvers run the same semi-Lagrangian step
///   V(x, v) <- min_w { h (|w|^2 / 2 + F) + beta * V(x + h v, v + h w) }
/// on the shared TransitionKernel, with beta = 1 (finite horizon) or
/// beta = 1 - delta h (discounted). Sweeps are pure Jacobi, so node updates
/// parallelize deterministically. The control argmin breaks ties toward the
/// lexicographically smallest control index.

/// Running cost per backward step index and state node.
using TimeCost = std::function<const std::vector<double>&(int t)>;

struct FiniteHorizonOptions {
  bool keep_slab = false;    // retain V(t, ., .) for t = 0..N
  bool keep_policy = false;  // retain argmin controls for t = 0..N-1
};

struct FiniteHorizonResult {
  ValueField v0;                         // V(0, ., .)
  std::vector<ValueField> slab;          // slab[t], t = 0..N (optional)
  std::vector<std::vector<int>> policy;  // policy[t][sid] (optional)
  int num_steps = 0;
};

/// Backward recursion from V(T, ., .) = g. T must be an integer multiple
/// of the grid step h. Monotone in g; solving with F + c shifts values by
/// c (T - t) exactly.
FiniteHorizonResult solve_finite_horizon(const TimeCost& F,
                                         const ValueField& g, double T,
                                         const TransitionKernel& kernel,
                                         const FiniteHorizonOptions& options = {});

FiniteHorizonResult solve_finite_horizon(const CostField& F,
                                         const ValueField& g, double T,
                                         const TransitionKernel& kernel,
                                         const FiniteHorizonOptions& options = {});

struct DiscountedSolveReport {
  ValueField field;          // V_delta
  double delta = 0.0;
  int iterations = 0;
  double sup_residual = 0.0; // max Bellman residual at the returned iterate
  double min_delta_v = 0.0;  // inf over nodes of delta * V_delta
  bool converged = false;
};

/// Fixed point of the discounted step with per-step factor (1 - delta h),
/// exact for the discrete chain (the continuous-rate factor e^{-delta h}
/// differs by O(delta^2 h^2)). Requires 0 < delta h < 1.
DiscountedSolveReport solve_discounted(const CostField& F, double delta,
                                       const TransitionKernel& kernel,
                                       double tol, int max_iterations = 0);

/// Same scheme with F replaced by min(F, R).
DiscountedSolveReport solve_discounted_truncated(const CostField& F, double R,
                                                 double delta,
                                                 const TransitionKernel& kernel,
                                                 double tol,
                                                 int max_iterations = 0);

/// Deterministic probe states: x in {0, 1/4, 1/2} by v in {0, +-v_max/2},
/// snapped to nodes.
std::vector<int> probe_states(const PhaseGrid& grid);

/// max over probe states of | delta V_delta - V^T(0)/T | with delta = 1/T.
double tauberian_gap(const CostField& F, double T,
                     const TransitionKernel& kernel, double tol = 1e-9);

}  // namespace accmfg

#endif  // ACCMFG_HJB_HPP
