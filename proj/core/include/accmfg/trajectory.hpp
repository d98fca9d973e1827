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

#ifndef ACCMFG_TRAJECTORY_HPP
#define ACCMFG_TRAJECTORY_HPP

#include "accmfg/curve.hpp"
#include "accmfg/hjb.hpp"
#include "accmfg/measures.hpp"

namespace accmfg {

struct MinimizeResult {
  Curve curve;       // greedy control read-out along the simulated chain
  double value;      // DP value at (0, x0, v0), the certified minimum
};

/// Dynamic programming on the grid followed by a greedy read-out of the
/// Q-value argmins along the simulated chain path. `value` equals the
/// semi-Lagrangian value function at (x0, v0); the reconstructed curve is a
/// feasible competitor whose exact cost differs from it by scheme error.
MinimizeResult minimize_horizon(const Vec& x0, const Vec& v0, double T,
                                const CostField& F, const TerminalCost& g,
                                const GridMeasure* terminal_measure,
                                const TransitionKernel& kernel);

/// Trajectory surgery: returns a curve that agrees with `curve` up to the
/// cut time tau and then returns to the start state, so that the endpoint
/// matches the initial state exactly (position modulo the torus).
///   tau = T - 1 when |v(T-1)| <= lambda_cut * R0 with R0 = max(1, |v(0)|),
///   otherwise the last step boundary with |v| below the threshold.
/// A single connector is used when tau >= T - 2, otherwise a unit-time
/// connector followed by a cruise loop, mirroring the two-segment case
/// split. Connector lifts are cost-minimizing (connect_cubic_lifted).
Curve make_periodic(const Curve& curve, double lambda_cut = 2.0);

/// Time-average of (x, v, w) along the curve deposited on grid nodes by
/// multilinear splitting (3-point Gauss per substep). Velocities must stay
/// inside the box; accelerations are clamped onto the control box.
ControlMeasure occupation_measure(const Curve& curve, const PhaseGrid& grid,
                                  double quad_step = 0.125);

}  // namespace accmfg

#endif  // ACCMFG_TRAJECTORY_HPP
