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

#include "accmfg/hjb.hpp"

#include <cmath>
#include <stdexcept>

#include "accmfg/parallel.hpp"

namespace accmfg {

namespace {

int step_count(double T, double h) {
  double steps = T / h;
  int n = static_cast<int>(std::lround(steps));
  if (n < 1 || std::abs(steps - n) > 1e-9)
    throw std::invalid_argument(
        "horizon T must be a positive integer multiple of the grid step h");
  return n;
}

/// One Jacobi sweep of the semi-Lagrangian operator.
/// out[s] = min_w { h * (cw[w] + running[s]) + beta * E[next | s, w] }.
void bellman_sweep(const TransitionKernel& kernel,
                   const std::vector<double>& running, double beta,
                   const std::vector<double>& next, std::vector<double>* out,
                   std::vector<int>* policy) {
  const PhaseGrid& grid = kernel.grid();
  const double h = grid.h();
  const std::vector<double>& cw = grid.control_cost();
  const int nv_flat = grid.num_v();

  parallel_for(0, grid.num_states(), [&](int lo, int hi) {
    for (int s = lo; s < hi; ++s) {
      const int vflat = s % nv_flat;
      double best = std::numeric_limits<double>::infinity();
      int best_w = -1;
      for (int w : grid.admissible_controls(vflat)) {
        double q = h * (cw[w] + running[s]) + beta * kernel.expect(next, s, w);
        if (q < best) {
          best = q;
          best_w = w;
        }
      }
      (*out)[s] = best;
      if (policy) (*policy)[s] = best_w;
    }
  });
}

}  // namespace

FiniteHorizonResult solve_finite_horizon(const TimeCost& F,
                                         const ValueField& g, double T,
                                         const TransitionKernel& kernel,
                                         const FiniteHorizonOptions& options) {
  const PhaseGrid& grid = kernel.grid();
  const int n = step_count(T, grid.h());

  FiniteHorizonResult res;
  res.num_steps = n;
  if (options.keep_slab) res.slab.assign(n + 1, ValueField(grid));
  if (options.keep_policy)
    res.policy.assign(n, std::vector<int>(grid.num_states(), -1));

  std::vector<double> next = g.values;
  if (static_cast<int>(next.size()) != grid.num_states())
    throw std::invalid_argument("terminal field does not match the grid");
  if (options.keep_slab) res.slab[n].values = next;

  std::vector<double> cur(grid.num_states());
  for (int t = n - 1; t >= 0; --t) {
    bellman_sweep(kernel, F(t), 1.0, next, &cur,
                  options.keep_policy ? &res.policy[t] : nullptr);
    next.swap(cur);
    if (options.keep_slab) res.slab[t].values = next;
  }
  res.v0.values = std::move(next);
  return res;
}

FiniteHorizonResult solve_finite_horizon(const CostField& F,
                                         const ValueField& g, double T,
                                         const TransitionKernel& kernel,
                                         const FiniteHorizonOptions& options) {
  ValueField table = F.on_grid(kernel.grid());
  auto cost = [&table](int) -> const std::vector<double>& {
    return table.values;
  };
  return solve_finite_horizon(cost, g, T, kernel, options);
}

DiscountedSolveReport solve_discounted(const CostField& F, double delta,
                                       const TransitionKernel& kernel,
                                       double tol, int max_iterations) {
  const PhaseGrid& grid = kernel.grid();
  const double h = grid.h();
  if (!(delta > 0) || !(delta * h < 1))
    throw std::invalid_argument("solve_discounted: need 0 < delta*h < 1");
  const double beta = 1.0 - delta * h;

  ValueField table = F.on_grid(grid);
  std::vector<double> v(grid.num_states(), 0.0), tv(grid.num_states());

  // Contraction with factor beta: bound the iteration count from the first
  // observed residual, plus margin.
  DiscountedSolveReport rep;
  rep.delta = delta;
  double residual = std::numeric_limits<double>::infinity();
  int limit = max_iterations;
  for (int it = 0;; ++it) {
    bellman_sweep(kernel, table.values, beta, v, &tv, nullptr);
    residual = 0.0;
    for (int s = 0; s < grid.num_states(); ++s)
      residual = std::max(residual, std::abs(tv[s] - v[s]));
    v.swap(tv);
    rep.iterations = it + 1;
    if (residual <= tol * beta) {  // next application contracts below tol
      rep.converged = true;
      break;
    }
    if (limit == 0 && it == 0) {
      double target = std::max(tol, 1e-300);
      limit = static_cast<int>(std::ceil(std::log(target / (residual + tol)) /
                                         std::log(beta))) +
              64;
      if (max_iterations > 0) limit = max_iterations;
    }
    if (limit > 0 && it + 1 >= limit) break;
  }

  rep.sup_residual = residual;
  rep.min_delta_v = std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid.num_states(); ++s)
    rep.min_delta_v = std::min(rep.min_delta_v, delta * v[s]);
  rep.field.values = std::move(v);
  return rep;
}

DiscountedSolveReport solve_discounted_truncated(const CostField& F, double R,
                                                 double delta,
                                                 const TransitionKernel& kernel,
                                                 double tol,
                                                 int max_iterations) {
  return solve_discounted(truncate(F, R), delta, kernel, tol, max_iterations);
}

std::vector<int> probe_states(const PhaseGrid& grid) {
  std::vector<int> probes;
  const double xs[] = {0.0, 0.25, 0.5};
  const double vs[] = {0.0, 0.5 * grid.v_max(), -0.5 * grid.v_max()};
  for (double px : xs)
    for (double pv : vs) {
      Vec x{px, grid.dim() > 1 ? px : 0.0};
      Vec v{pv, grid.dim() > 1 ? pv : 0.0};
      int sid = grid.nearest_state(x, v);
      bool dup = false;
      for (int q : probes) dup = dup || q == sid;
      if (!dup) probes.push_back(sid);
    }
  return probes;
}

double tauberian_gap(const CostField& F, double T,
                     const TransitionKernel& kernel, double tol) {
  const PhaseGrid& grid = kernel.grid();
  const double delta = 1.0 / T;
  DiscountedSolveReport disc = solve_discounted(F, delta, kernel, tol);
  FiniteHorizonResult fin =
      solve_finite_horizon(F, ValueField(grid, 0.0), T, kernel);
  double gap = 0.0;
  for (int s : probe_states(grid))
    gap = std::max(gap, std::abs(delta * disc.field.values[s] -
                                 fin.v0.values[s] / T));
  return gap;
}

}  // namespace accmfg
