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

#include "accmfg/pdhg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "accmfg/parallel.hpp"

namespace accmfg {

namespace {

struct PairIndex {
  std::vector<int> pids;       // admissible pair ids in LP order
  std::vector<int> sid, wflat; // unpacked per column
};

PairIndex admissible_pairs(const PhaseGrid& grid) {
  PairIndex px;
  const int nw = grid.num_w();
  const int nv = grid.num_v();
  for (int s = 0; s < grid.num_states(); ++s)
    for (int w : grid.admissible_controls(s % nv)) {
      px.pids.push_back(s * nw + w);
      px.sid.push_back(s);
      px.wflat.push_back(w);
    }
  return px;
}

// r = A x: stationarity rows (out - in) then the mass row.
void apply_A(const TransitionKernel& kernel, const PairIndex& px,
             const std::vector<double>& x, std::vector<double>* r) {
  const PhaseGrid& grid = kernel.grid();
  std::fill(r->begin(), r->end(), 0.0);
  double mass = 0.0;
  int ids[16];
  double wts[16];
  for (std::size_t j = 0; j < px.pids.size(); ++j) {
    double v = x[j];
    if (v == 0.0) continue;
    mass += v;
    (*r)[px.sid[j]] += v;
    int n = kernel.destinations(px.sid[j], px.wflat[j], ids, wts);
    for (int i = 0; i < n; ++i) (*r)[ids[i]] -= v * wts[i];
  }
  (*r)[grid.num_states()] = mass;
}

// g = A' y per column: y_s - E[y | s, w] + y_mass.
void apply_At(const TransitionKernel& kernel, const PairIndex& px,
              const std::vector<double>& y, std::vector<double>* g) {
  const PhaseGrid& grid = kernel.grid();
  const double ym = y[grid.num_states()];
  parallel_for(0, static_cast<int>(px.pids.size()), [&](int lo, int hi) {
    int ids[16];
    double wts[16];
    for (int j = lo; j < hi; ++j) {
      int n = kernel.destinations(px.sid[j], px.wflat[j], ids, wts);
      double e = 0.0;
      for (int i = 0; i < n; ++i) e += wts[i] * y[ids[i]];
      (*g)[j] = y[px.sid[j]] - e + ym;
    }
  });
}

double estimate_op_norm(const TransitionKernel& kernel, const PairIndex& px) {
  const int m = kernel.grid().num_states() + 1;
  std::vector<double> z(px.pids.size(), 1.0), r(m), g(px.pids.size());
  double norm = 1.0;
  for (int it = 0; it < 30; ++it) {
    apply_A(kernel, px, z, &r);
    apply_At(kernel, px, r, &g);
    double nrm = 0.0;
    for (double v : g) nrm += v * v;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) break;
    norm = nrm;
    for (std::size_t j = 0; j < z.size(); ++j) z[j] = g[j] / nrm;
  }
  return std::sqrt(norm) + 1e-12;
}

/// Relative-value sweeps produce dual-feasible potentials; the best certified
/// lower bound over the sweeps is kept.
struct DualBound {
  std::vector<double> phi;
  double lambda = -std::numeric_limits<double>::infinity();
};

DualBound improve_dual(const TransitionKernel& kernel,
                       const std::vector<double>& pair_cost, int sweeps,
                       double stop_improvement) {
  const PhaseGrid& grid = kernel.grid();
  const double h = grid.h();
  const int nv = grid.num_v();
  const int nw = grid.num_w();
  std::vector<double> phi(grid.num_states(), 0.0), next(grid.num_states());
  DualBound best;
  best.phi = phi;
  int since_improved = 0;
  for (int it = 0; it < sweeps; ++it) {
    parallel_for(0, grid.num_states(), [&](int lo, int hi) {
      for (int s = lo; s < hi; ++s) {
        double bestq = std::numeric_limits<double>::infinity();
        for (int w : grid.admissible_controls(s % nv)) {
          double q = h * pair_cost[static_cast<std::size_t>(s) * nw + w] +
                     kernel.expect(phi, s, w);
          bestq = std::min(bestq, q);
        }
        next[s] = bestq;
      }
    });
    // keep the iterates bounded
    double mn = next[0];
    for (double v : next) mn = std::min(mn, v);
    for (std::size_t s = 0; s < next.size(); ++s) phi[s] = next[s] - mn;

    if (it % 20 == 19 || it == sweeps - 1) {
      double cand = lambda_dual_from_potentials(phi, pair_cost, kernel);
      if (cand > best.lambda + stop_improvement) {
        best.lambda = cand;
        best.phi = phi;
        since_improved = 0;
      } else if (cand > best.lambda) {
        best.lambda = cand;
        best.phi = phi;
        ++since_improved;
      } else {
        ++since_improved;
      }
      if (since_improved > 8) break;
    }
  }
  return best;
}

/// Columns for the polishing LP: every admissible control at the seed
/// states, rest controls along the induced x-orbits, and all rest atoms.
/// Returns false when the closure exceeds the variable budget.
bool support_closure(const TransitionKernel& kernel,
                     const std::vector<char>& seed_state,
                     std::int64_t column_budget, std::vector<int>* pair_ids) {
  const PhaseGrid& grid = kernel.grid();
  const int nw = grid.num_w();
  const int nv = grid.num_v();
  const int w0 = grid.w_zero_index();
  int wi0[kMaxDim] = {w0, w0};
  const int w0f = grid.control_flat(wi0);

  std::vector<char> has_outflow(grid.num_states(), 0);
  std::vector<int> queue;
  pair_ids->clear();

  auto add_state = [&](int s, bool all_controls) {
    if (has_outflow[s]) return;
    has_outflow[s] = 1;
    if (all_controls) {
      for (int w : grid.admissible_controls(s % nv))
        pair_ids->push_back(s * nw + w);
    } else {
      pair_ids->push_back(s * nw + w0f);
    }
    queue.push_back(s);
  };

  // seed states first (they keep their whole control set), then the rest
  // atoms that guarantee feasibility of the polishing LP
  for (int s = 0; s < grid.num_states(); ++s)
    if (seed_state[s]) add_state(s, true);
  for (int s = 0; s < grid.num_states(); ++s) {
    bool at_rest = true;
    int vi[kMaxDim], xi[kMaxDim];
    grid.state_indices(s, xi, vi);
    for (int a = 0; a < grid.dim(); ++a)
      at_rest = at_rest && vi[a] == grid.v_zero_index();
    if (at_rest) add_state(s, false);
  }

  int ids[16];
  double wts[16];
  for (std::size_t q = 0; q < queue.size(); ++q) {
    int s = queue[q];
    // destinations of every column we emitted for s
    if (static_cast<std::int64_t>(pair_ids->size()) > column_budget)
      return false;
    std::vector<int> ws;
    if (seed_state[s]) {
      ws.assign(grid.admissible_controls(s % nv).begin(),
                grid.admissible_controls(s % nv).end());
    } else {
      ws.push_back(w0f);
    }
    for (int w : ws) {
      int n = kernel.destinations(s, w, ids, wts);
      for (int i = 0; i < n; ++i) add_state(ids[i], false);
    }
  }
  std::sort(pair_ids->begin(), pair_ids->end());
  pair_ids->erase(std::unique(pair_ids->begin(), pair_ids->end()),
                  pair_ids->end());
  return static_cast<std::int64_t>(pair_ids->size()) <= column_budget;
}

struct PolishOutcome {
  bool ok = false;
  double lambda = 0.0;
  ControlMeasure mu;
};

PolishOutcome polish(const TransitionKernel& kernel,
                     const std::vector<double>& pair_cost,
                     const std::vector<char>& seed_state,
                     std::int64_t column_budget) {
  PolishOutcome out;
  std::vector<int> pair_ids;
  if (!support_closure(kernel, seed_state, column_budget, &pair_ids))
    return out;
  ErgodicLP lp = ErgodicLP::assemble_subset(pair_cost, kernel, pair_ids);
  SimplexResult sr = simplex_solve(lp.A, lp.c, lp.b, {});
  if (sr.status != SimplexStatus::optimal) return out;
  out.ok = true;
  out.lambda = sr.objective;
  out.mu = ControlMeasure(kernel.grid());
  for (std::size_t j = 0; j < pair_ids.size(); ++j)
    out.mu.weights[pair_ids[j]] = std::max(sr.x[j], 0.0);
  double mass = out.mu.total_mass();
  if (mass > 0 && std::abs(mass - 1.0) > 1e-13)
    for (double& w : out.mu.weights) w /= mass;
  return out;
}

}  // namespace

ErgodicSolution solve_ergodic_pdhg(const CostField& F,
                                   const TransitionKernel& kernel, double tol,
                                   const ErgodicLPOptions& options) {
  const PhaseGrid& grid = kernel.grid();
  const int m = grid.num_states() + 1;
  const PairIndex px = admissible_pairs(grid);
  const std::vector<double> pair_cost = F.pair_cost(grid);
  std::vector<double> c(px.pids.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = pair_cost[px.pids[j]];

  // certified dual bound, independent of the primal iterates
  DualBound dual = improve_dual(kernel, pair_cost, options.dual_sweeps,
                                0.01 * tol);

  const double op_norm = estimate_op_norm(kernel, px);
  const double tau = 0.95 / op_norm;
  const double sigma = 0.95 / op_norm;

  std::vector<double> x(px.pids.size(), 0.0), xbar(px.pids.size(), 0.0);
  std::vector<double> y(m, 0.0), g(px.pids.size()), r(m), xprev;
  // start from the uniform rest measure
  {
    GridMeasure rest = GridMeasure::uniform_x_rest(grid);
    const int nw = grid.num_w();
    for (std::size_t j = 0; j < px.pids.size(); ++j) {
      int s = px.sid[j];
      if (rest.weights[s] > 0 && px.pids[j] % nw == grid.nearest_control(
                                                        Vec{0.0, 0.0}))
        x[j] = rest.weights[s];
    }
  }

  ErgodicSolution sol;
  sol.solver = "pdhg+polish";
  sol.lambda_dual = dual.lambda;

  const int check_every = 500;
  PolishOutcome best_polish;
  std::int64_t it = 0;
  for (; it < options.pdhg_max_iterations; ++it) {
    xprev = x;
    apply_At(kernel, px, y, &g);
    for (std::size_t j = 0; j < x.size(); ++j)
      x[j] = std::max(0.0, x[j] - tau * (c[j] + g[j]));
    // extrapolated dual step
    std::vector<double>& xtmp = g;  // reuse storage
    for (std::size_t j = 0; j < x.size(); ++j)
      xtmp[j] = 2.0 * x[j] - xprev[j];
    apply_A(kernel, px, xtmp, &r);
    r[m - 1] -= 1.0;
    for (int i = 0; i < m; ++i) y[i] += sigma * r[i];

    double a = 1.0 / (it + 1.0);
    for (std::size_t j = 0; j < x.size(); ++j)
      xbar[j] = (1.0 - a) * xbar[j] + a * x[j];

    if ((it + 1) % check_every == 0) {
      // polish the current average and test the certified gap
      double mx = 0.0;
      for (double v : xbar) mx = std::max(mx, v);
      std::vector<char> seed(grid.num_states(), 0);
      for (std::size_t j = 0; j < xbar.size(); ++j)
        if (xbar[j] > 1e-5 * mx) seed[px.sid[j]] = 1;
      PolishOutcome po =
          polish(kernel, pair_cost, seed, options.polish_variable_limit);
      if (po.ok && (!best_polish.ok || po.lambda < best_polish.lambda))
        best_polish = po;
      if (best_polish.ok &&
          best_polish.lambda - dual.lambda <=
              tol * (1.0 + std::abs(best_polish.lambda))) {
        ++it;
        break;
      }
    }
  }

  sol.iterations = it;
  if (!best_polish.ok) {
    // no feasible polish yet: try the pure rest-atom closure
    std::vector<char> seed(grid.num_states(), 0);
    best_polish =
        polish(kernel, pair_cost, seed, options.polish_variable_limit);
  }

  if (best_polish.ok) {
    sol.lambda = best_polish.lambda;
    sol.mu = best_polish.mu;
  } else {
    // return the (approximately feasible) ergodic average, flagged
    sol.mu = ControlMeasure(grid);
    double mass = 0.0;
    for (double v : xbar) mass += v;
    for (std::size_t j = 0; j < xbar.size(); ++j)
      sol.mu.weights[px.pids[j]] = mass > 0 ? xbar[j] / mass : 0.0;
    sol.lambda = sol.mu.integrate_pairs(pair_cost);
  }
  sol.phi = ValueField(grid);
  double mn = std::numeric_limits<double>::infinity();
  for (int s = 0; s < grid.num_states(); ++s) {
    sol.phi.values[s] = dual.phi[s];
    mn = std::min(mn, sol.phi.values[s]);
  }
  for (double& v : sol.phi.values) v -= mn;
  sol.duality_gap = sol.lambda - sol.lambda_dual;
  sol.residual = closedness_residual(sol.mu, kernel);
  sol.converged =
      sol.duality_gap <= tol * (1.0 + std::abs(sol.lambda)) &&
      sol.residual <= 1e-8;
  return sol;
}

}  // namespace accmfg
