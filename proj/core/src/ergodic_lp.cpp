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

#include "accmfg/ergodic_lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "accmfg/parallel.hpp"
#include "accmfg/pdhg.hpp"

namespace accmfg {

namespace {

void append_pair_column(const TransitionKernel& kernel, int sid, int wflat,
                        SparseColumns* A) {
  const int norm_row = kernel.grid().num_states();
  int ids[16];
  double wts[16];
  int n = kernel.destinations(sid, wflat, ids, wts);
  // outflow +1 at sid, inflow -P at destinations, +1 in the mass row
  int rows[18];
  double vals[18];
  int nnz = 0;
  rows[nnz] = sid;
  vals[nnz++] = 1.0;
  for (int i = 0; i < n; ++i) {
    rows[nnz] = ids[i];
    vals[nnz++] = -wts[i];
  }
  rows[nnz] = norm_row;
  vals[nnz++] = 1.0;
  // merge duplicate rows (self-transitions)
  int out = 0;
  for (int i = 0; i < nnz; ++i) {
    bool merged = false;
    for (int j = 0; j < out; ++j)
      if (rows[j] == rows[i]) {
        vals[j] += vals[i];
        merged = true;
        break;
      }
    if (!merged) {
      rows[out] = rows[i];
      vals[out++] = vals[i];
    }
  }
  A->add_column(rows, vals, out);
}

}  // namespace

ErgodicLP ErgodicLP::assemble(const CostField& F,
                              const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  ErgodicLP lp;
  lp.kernel = &kernel;
  lp.pair_cost = F.pair_cost(grid);

  const int nw = grid.num_w();
  const int nv = grid.num_v();
  for (int s = 0; s < grid.num_states(); ++s)
    for (int w : grid.admissible_controls(s % nv))
      lp.columns.push_back(s * nw + w);

  lp.A.rows = grid.num_states() + 1;
  lp.A.row_idx.reserve(lp.columns.size() * 8);
  lp.A.value.reserve(lp.columns.size() * 8);
  lp.c.reserve(lp.columns.size());
  for (int pid : lp.columns) {
    append_pair_column(kernel, pid / nw, pid % nw, &lp.A);
    lp.c.push_back(lp.pair_cost[pid]);
  }
  lp.b.assign(lp.A.rows, 0.0);
  lp.b.back() = 1.0;
  return lp;
}

ErgodicLP ErgodicLP::assemble_subset(const std::vector<double>& pair_cost,
                                     const TransitionKernel& kernel,
                                     const std::vector<int>& pair_ids) {
  const PhaseGrid& grid = kernel.grid();
  const int nw = grid.num_w();
  ErgodicLP lp;
  lp.kernel = &kernel;
  lp.pair_cost = pair_cost;
  lp.columns = pair_ids;
  lp.A.rows = grid.num_states() + 1;
  for (int pid : lp.columns) {
    append_pair_column(kernel, pid / nw, pid % nw, &lp.A);
    lp.c.push_back(pair_cost[pid]);
  }
  lp.b.assign(lp.A.rows, 0.0);
  lp.b.back() = 1.0;
  return lp;
}

double lambda_dual_from_potentials(const std::vector<double>& phi,
                                   const std::vector<double>& pair_cost,
                                   const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  const double h = grid.h();
  const int nw = grid.num_w();
  const int nv = grid.num_v();
  double lo = std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid.num_states(); ++s) {
    for (int w : grid.admissible_controls(s % nv)) {
      double slack = pair_cost[static_cast<std::size_t>(s) * nw + w] +
                     (kernel.expect(phi, s, w) - phi[s]) / h;
      lo = std::min(lo, slack);
    }
  }
  return lo;
}

namespace {

ErgodicSolution finish_from_lp(const ErgodicLP& lp, const SimplexResult& sr,
                               const TransitionKernel& kernel,
                               const std::string& solver_name) {
  const PhaseGrid& grid = kernel.grid();
  ErgodicSolution sol;
  sol.solver = solver_name;
  sol.iterations = sr.iterations;
  sol.warm_basis = sr.basis;
  sol.lambda = sr.objective;

  sol.mu = ControlMeasure(grid);
  for (std::size_t j = 0; j < lp.columns.size(); ++j)
    sol.mu.weights[lp.columns[j]] = std::max(sr.x[j], 0.0);
  // exact renormalization guards tiny simplex round-off
  double mass = sol.mu.total_mass();
  if (std::abs(mass - 1.0) > 1e-13 && mass > 0)
    for (double& w : sol.mu.weights) w /= mass;

  // Dual corrector phi = h * y_states, normalized to min phi = 0. With this
  // scaling the row duals certify  lambda h + phi <= h L + P phi  exactly.
  const double h = grid.h();
  sol.phi = ValueField(grid);
  double mn = std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid.num_states(); ++s) {
    sol.phi.values[s] = h * sr.y[s];
    mn = std::min(mn, sol.phi.values[s]);
  }
  for (double& v : sol.phi.values) v -= mn;
  sol.lambda_dual =
      lambda_dual_from_potentials(sol.phi.values, lp.pair_cost, kernel);

  sol.duality_gap = sol.lambda - sol.lambda_dual;
  sol.residual = closedness_residual(sol.mu, kernel);
  return sol;
}

}  // namespace

ErgodicSolution solve_ergodic(const CostField& F,
                              const TransitionKernel& kernel, double tol,
                              const ErgodicLPOptions& options) {
  const PhaseGrid& grid = kernel.grid();

  // count admissible pairs
  std::int64_t nvars = 0;
  for (int vf = 0; vf < grid.num_v(); ++vf)
    nvars += static_cast<std::int64_t>(grid.admissible_controls(vf).size()) *
             grid.num_x();

  if (nvars <= options.simplex_variable_limit) {
    ErgodicLP lp = ErgodicLP::assemble(F, kernel);
    SimplexOptions sopt;
    sopt.warm_basis = options.warm_basis;
    SimplexResult sr = simplex_solve(lp.A, lp.c, lp.b, sopt);
    if (sr.status == SimplexStatus::infeasible)
      throw std::logic_error(
          "solve_ergodic: LP infeasible (grid construction bug)");
    ErgodicSolution sol = finish_from_lp(lp, sr, kernel, "simplex");
    sol.converged = sr.status == SimplexStatus::optimal &&
                    sol.duality_gap <= tol * (1.0 + std::abs(sol.lambda));
    return sol;
  }
  return solve_ergodic_pdhg(F, kernel, tol, options);
}

}  // namespace accmfg
