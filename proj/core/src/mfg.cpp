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

#include "accmfg/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace accmfg {

BestResponseResult best_response(const GridMeasure& m,
                                 const MeanFieldCoupling& coupling,
                                 const TransitionKernel& kernel, double tol,
                                 const ErgodicLPOptions& lp_options) {
  if (!m.is_normalized(1e-9))
    throw std::invalid_argument("best_response: m not normalized");
  CostField frozen = coupling.freeze(m, kernel.grid());
  BestResponseResult out;
  out.lp = solve_ergodic(frozen, kernel, tol, lp_options);
  out.lambda = out.lp.lambda;
  return out;
}

ErgodicMFGSolution solve_ergodic_mfg(const MeanFieldCoupling& coupling,
                                     const TransitionKernel& kernel,
                                     const GridMeasure& m_init,
                                     const ErgodicMFGOptions& options) {
  const PhaseGrid& grid = kernel.grid();
  ErgodicMFGSolution sol;

  if (options.monotonicity_pairs > 0 && coupling.strength > 0) {
    MonotonicityReport mono =
        check_monotonicity(coupling, options.monotonicity_pairs, grid);
    sol.monotonicity_warning = !mono.pass;
  }

  GridMeasure m = m_init;
  ControlMeasure mu_avg(grid);
  ErgodicLPOptions lp_options = options.lp;
  const double residual_tol = options.tol / options.residual_safety;

  for (int k = 0; k < options.max_iterations; ++k) {
    BestResponseResult br =
        best_response(m, coupling, kernel, options.lp.tol, lp_options);
    lp_options.warm_basis = br.lp.warm_basis;
    sol.lambda_history.push_back(br.lambda);
    sol.iterations = k + 1;

    GridMeasure br_marginal = br.lp.mu.xv_marginal(grid);
    double residual = wasserstein1(br_marginal, m, grid);

    // value consistency of the averaged measure against the frozen cost
    CostField frozen = coupling.freeze(m, grid);
    double mu_cost = k == 0 ? br.lambda
                            : mu_avg.integrate_pairs(frozen.pair_cost(grid));
    double vgap = std::abs(br.lambda - mu_cost);

    if (k > 0 && residual <= residual_tol &&
        vgap <= options.tol * (1.0 + std::abs(br.lambda))) {
      sol.lambda_bar = br.lambda;
      sol.fixed_point_residual = residual;
      sol.value_gap = vgap;
      sol.converged = true;
      break;
    }

    double beta = options.damping(k);
    if (k == 0) {
      mu_avg = br.lp.mu;
      m = br_marginal;
    } else {
      for (std::size_t i = 0; i < mu_avg.weights.size(); ++i)
        mu_avg.weights[i] =
            (1.0 - beta) * mu_avg.weights[i] + beta * br.lp.mu.weights[i];
      for (std::size_t i = 0; i < m.weights.size(); ++i)
        m.weights[i] =
            (1.0 - beta) * m.weights[i] + beta * br_marginal.weights[i];
    }
    sol.lambda_bar = br.lambda;
    sol.fixed_point_residual = residual;
    sol.value_gap = vgap;
  }

  sol.mu_bar = mu_avg;
  sol.m_bar = sol.mu_bar.xv_marginal(grid);
  sol.boundary_mass = sol.m_bar.boundary_mass_fraction(grid);
  sol.second_moment = sol.m_bar.second_moment(grid);
  return sol;
}

namespace {

/// sup_t d1 between two m-flows, with a cheap upper-bound pruning pass so
/// that only slices that can exceed the current maximum are solved exactly.
double flow_distance(const std::vector<GridMeasure>& a,
                     const std::vector<GridMeasure>& b,
                     const PhaseGrid& grid) {
  const std::size_t n = std::min(a.size(), b.size());
  std::vector<std::pair<double, std::size_t>> order(n);
  for (std::size_t t = 0; t < n; ++t)
    order[t] = {wasserstein1_upper_bound(a[t], b[t], grid), t};
  std::sort(order.begin(), order.end(),
            [](const auto& p, const auto& q) { return p.first > q.first; });
  double best = 0.0;
  for (const auto& [ub, t] : order) {
    if (ub <= best) break;
    best = std::max(best, wasserstein1(a[t], b[t], grid));
  }
  return best;
}

}  // namespace

MFGTimeSolution solve_mfg_time(const MeanFieldCoupling& coupling,
                               const TerminalCost& g, const GridMeasure& m0,
                               double T, const TransitionKernel& kernel,
                               const MFGTimeOptions& options) {
  const PhaseGrid& grid = kernel.grid();
  if (std::abs(coupling.base.alpha - 2.0) > 1e-12)
    throw std::invalid_argument("solve_mfg_time: requires alpha = 2");
  if (!m0.is_normalized(1e-9))
    throw std::invalid_argument("solve_mfg_time: m0 not normalized");

  const double h = grid.h();
  const int n = static_cast<int>(std::lround(T / h));
  if (n < 1 || std::abs(n * h - T) > 1e-9)
    throw std::invalid_argument("solve_mfg_time: T must be a multiple of h");

  MFGTimeSolution sol;
  sol.horizon = T;
  sol.m_flow.assign(n + 1, m0);

  std::vector<std::vector<double>> cost_tables(n);
  FiniteHorizonOptions dp_opts;
  dp_opts.keep_slab = true;
  dp_opts.keep_policy = true;

  for (int it = 0; it < options.max_iterations; ++it) {
    // freeze the flow costs
    for (int t = 0; t < n; ++t)
      cost_tables[t] = coupling.freeze(sol.m_flow[t], grid).on_grid(grid)
                           .values;
    ValueField g_field = g.freeze(sol.m_flow[n], grid);
    auto running = [&cost_tables](int t) -> const std::vector<double>& {
      return cost_tables[t];
    };

    FiniteHorizonResult dp =
        solve_finite_horizon(running, g_field, T, kernel, dp_opts);

    // forward transport through the argmin controls
    std::vector<GridMeasure> next(n + 1, GridMeasure(grid));
    next[0] = m0;
    std::vector<double> pushed;
    for (int t = 0; t < n; ++t) {
      kernel.push_policy(next[t].weights, dp.policy[t], &pushed);
      next[t + 1].weights = pushed;
    }

    double beta = options.damping(it);
    std::vector<GridMeasure> averaged(n + 1, GridMeasure(grid));
    for (int t = 0; t <= n; ++t)
      for (int s = 0; s < grid.num_states(); ++s)
        averaged[t].weights[s] = (1.0 - beta) * sol.m_flow[t].weights[s] +
                                 beta * next[t].weights[s];

    double residual = flow_distance(averaged, sol.m_flow, grid);
    sol.m_flow.swap(averaged);
    sol.iterations = it + 1;
    sol.picard_residual = residual;
    if (residual <= options.tol) {
      sol.converged = true;
      break;
    }
  }

  // the reported value slab belongs to the returned flow, so the frozen
  // transport program reproduces <u(0), m0> exactly
  for (int t = 0; t < n; ++t)
    cost_tables[t] = coupling.freeze(sol.m_flow[t], grid).on_grid(grid).values;
  ValueField g_field = g.freeze(sol.m_flow[n], grid);
  auto running = [&cost_tables](int t) -> const std::vector<double>& {
    return cost_tables[t];
  };
  FiniteHorizonOptions slab_only;
  slab_only.keep_slab = true;
  sol.u = solve_finite_horizon(running, g_field, T, kernel, slab_only).slab;

  sol.value0 = 0.0;
  for (int s = 0; s < grid.num_states(); ++s)
    sol.value0 += sol.u[0].values[s] * m0.weights[s];
  return sol;
}

std::vector<LongTimeRow> long_time_average_experiment(
    const MeanFieldCoupling& coupling, const TerminalCost& g,
    const GridMeasure& m0, const std::vector<double>& horizons,
    const TransitionKernel& kernel, double lambda_bar,
    const MFGTimeOptions& options) {
  const PhaseGrid& grid = kernel.grid();
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1])
      throw std::invalid_argument("horizons must be increasing");
  std::vector<LongTimeRow> rows;
  for (double T : horizons) {
    MFGTimeSolution sol = solve_mfg_time(coupling, g, m0, T, kernel, options);
    LongTimeRow row;
    row.T = T;
    row.value0_over_T = sol.value0 / T;
    row.gap = std::abs(row.value0_over_T - lambda_bar);
    row.probe_sup = 0.0;
    for (int s : probe_states(grid))
      row.probe_sup = std::max(
          row.probe_sup, std::abs(sol.u[0].values[s] / T - lambda_bar));
    row.converged = sol.converged;
    rows.push_back(row);
  }
  return rows;
}

EnergyDiagnostic energy_diagnostic(const MFGTimeSolution& sol,
                                   const GridMeasure& m_bar,
                                   const MeanFieldCoupling& coupling,
                                   const PhaseGrid& grid) {
  EnergyDiagnostic out;
  const double h = grid.h();
  const int d = grid.dim();
  const double cell = std::pow(grid.dx(), d) * std::pow(grid.dv(), d);
  ValueField f_bar = coupling.freeze(m_bar, grid).on_grid(grid);

  const int n = static_cast<int>(sol.m_flow.size()) - 1;
  for (int t = 0; t < n; ++t) {
    ValueField f_t = coupling.freeze(sol.m_flow[t], grid).on_grid(grid);
    double l2 = 0.0, sup = 0.0;
    for (int s = 0; s < grid.num_states(); ++s) {
      double diff = f_t.values[s] - f_bar.values[s];
      l2 += diff * diff * cell;
      Vec x, v;
      grid.state_coords(s, &x, &v);
      double weight =
          std::pow(1.0 + norm2sq(v, d), 2.0 * d);
      sup = std::max(sup, std::pow(std::abs(diff), 2.0 * d + 2.0) / weight);
    }
    out.l2_integral += h * l2;
    out.weighted_sup_integral += h * sup;
  }
  return out;
}

double oscillation_report(const MFGTimeSolution& sol, double R,
                          const PhaseGrid& grid) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid.num_states(); ++s) {
    Vec x, v;
    grid.state_coords(s, &x, &v);
    if (norm2(v, grid.dim()) > R + 1e-12) continue;
    lo = std::min(lo, sol.u[0].values[s]);
    hi = std::max(hi, sol.u[0].values[s]);
  }
  if (!std::isfinite(lo) || !std::isfinite(hi)) return 0.0;
  return hi - lo;
}

}  // namespace accmfg
