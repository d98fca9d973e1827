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

#ifndef ACCMFG_ERGODIC_LP_HPP
#define ACCMFG_ERGODIC_LP_HPP

#include <string>
#include <vector>

#include "accmfg/costs.hpp"
#include "accmfg/measures.hpp"
#include "accmfg/simplex.hpp"

namespace accmfg {

/// The closed-measure linear program on the discrete chain:
///   minimize  sum_{(x,v,w)} (|w|^2/2 + F(x,v)) mu(x,v,w)
///   subject to   outflow(s) = inflow(s) for every node s   (stationarity)
///                sum mu = 1,  mu >= 0.
/// Stationarity of the interpolated one-step chain is the weak closedness
/// condition tested against nodal hat functions. The program is always
/// feasible: rest atoms (any x, v = 0, w = 0) are exact fixed points.
struct ErgodicLP {
  const TransitionKernel* kernel = nullptr;
  std::vector<double> pair_cost;     // over all pair ids
  std::vector<int> columns;          // admissible pair ids, LP column order
  SparseColumns A;                   // rows: states..., last = normalization
  std::vector<double> b, c;          // rhs and objective

  static ErgodicLP assemble(const CostField& F, const TransitionKernel& kernel);
  /// Restricted variant over the given pair ids (closure must hold outside;
  /// used by the first-order solve's polishing step).
  static ErgodicLP assemble_subset(const std::vector<double>& pair_cost,
                                   const TransitionKernel& kernel,
                                   const std::vector<int>& pair_ids);

  void export_mps(const std::string& path) const { write_mps(A, c, b, path); }
};

struct ErgodicSolution {
  double lambda = 0.0;        // optimal value
  ControlMeasure mu;          // optimal closed measure
  ValueField phi;             // dual corrector, normalized to min phi = 0
  double lambda_dual = 0.0;   // certified lower bound from phi
  double duality_gap = 0.0;   // lambda - lambda_dual
  double residual = 0.0;      // closedness residual of mu
  std::int64_t iterations = 0;
  std::string solver;         // "simplex" or "pdhg+polish"
  bool converged = false;
  std::vector<int> warm_basis;  // reusable simplex basis
};

struct ErgodicLPOptions {
  double tol = 1e-9;  // absolute slack added to the relative gap target
  std::int64_t simplex_variable_limit = 50000;
  std::int64_t polish_variable_limit = 50000;  // support-closure budget
  std::vector<int> warm_basis;
  int pdhg_max_iterations = 60000;
  int dual_sweeps = 4000;  // relative-value sweeps for the large-scale dual
};

/// Solves the ergodic LP: exact simplex up to the variable limit, otherwise
/// a primal-dual first-order method with ergodic averaging followed by
/// feasibility polishing on the support closure.
ErgodicSolution solve_ergodic(const CostField& F,
                              const TransitionKernel& kernel, double tol,
                              const ErgodicLPOptions& options = {});

/// Certified dual bound: given node potentials phi (any vector), the value
///   min_{(s,w) admissible} [ L(s,w) + (E[phi | s,w] - phi(s)) / h ]
/// is dual feasible, hence a lower bound for the LP value.
double lambda_dual_from_potentials(const std::vector<double>& phi,
                                   const std::vector<double>& pair_cost,
                                   const TransitionKernel& kernel);

struct RelativeValueResult {
  std::vector<double> phi;     // potentials at the best certified bound
  double lambda_dual = 0.0;    // best certified lower bound seen
  std::vector<int> policy;     // greedy control (flat id) per state
};

/// Relative-value sweeps phi <- min_w { h L + P phi } (shifted to stay
/// bounded). Produces dual-feasible potentials, a certified lower bound and
/// the greedy policy, used both as the large-scale dual route and as the
/// crash basis for the simplex.
RelativeValueResult relative_value_sweeps(const TransitionKernel& kernel,
                                          const std::vector<double>& pair_cost,
                                          int max_sweeps,
                                          double stop_improvement);

}  // namespace accmfg

#endif  // ACCMFG_ERGODIC_LP_HPP
