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

#ifndef ACCMFG_FLOW_LP_HPP
#define ACCMFG_FLOW_LP_HPP

#include "accmfg/costs.hpp"
#include "accmfg/hjb.hpp"
#include "accmfg/measures.hpp"

namespace accmfg {

struct FlowSolveResult {
  double value = 0.0;
  FlowMeasure flow;
};

/// The dynamic T-closed-measure program
///   minimize  sum_t h <L_t, mu_t> + <g, m_T>
///   subject to pi#mu_0 = m0 and pi#mu_{t+1} = one-step push of mu_t.
/// Solved by LP/DP duality on the identical chain: backward dynamic
/// programming plus forward transport of m0 through the argmin controls.
/// The returned value equals <V(0,.,.), m0> exactly (the optimal policy's
/// Bellman equalities telescope), which is the discrete version of the
/// representation of the value as an infimum over T-closed measures.
FlowSolveResult solve_finite_horizon_lp(const TimeCost& F,
                                        const ValueField& g,
                                        const GridMeasure& m0, double T,
                                        const TransitionKernel& kernel);

FlowSolveResult solve_finite_horizon_lp(const CostField& F,
                                        const ValueField& g,
                                        const GridMeasure& m0, double T,
                                        const TransitionKernel& kernel);

/// Objective of a given flow: sum_t h <L_t, mu_t> + <g, terminal>.
double flow_cost(const FlowMeasure& flow, const TimeCost& F,
                 const ValueField& g, const PhaseGrid& grid);
double flow_cost(const FlowMeasure& flow, const CostField& F,
                 const ValueField& g, const PhaseGrid& grid);

/// Concatenation: requires the terminal (x, v)-marginal of `a` to equal the
/// initial marginal of `b` within 1e-10 (max norm). Cost is additive.
FlowMeasure concat_flows(const FlowMeasure& a, const FlowMeasure& b,
                         const PhaseGrid& grid);

struct LinkResult {
  FlowMeasure flow;  // horizon 1, initial marginal m1, terminal marginal m2
  double cost = 0.0; // sum of pair-weighted connector costs (exact quadrature)
};

/// Links m1 to m2 in unit time through the product coupling m1 (x) m2 with
/// one cubic connector per support pair. The terminal slice hits m2 exactly
/// (connectors end on nodes); intermediate slices are curve deposits. The
/// cost obeys C2 (1 + M2(m1) + M2(m2)) with C2 fitted by the tests.
LinkResult link_measures(const GridMeasure& m1, const GridMeasure& m2,
                         const CostField& F, const TransitionKernel& kernel);

}  // namespace accmfg

#endif  // ACCMFG_FLOW_LP_HPP
