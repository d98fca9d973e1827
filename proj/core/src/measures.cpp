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

#include "accmfg/measures.hpp"

#include <cmath>
#include <stdexcept>

namespace accmfg {

GridMeasure GridMeasure::dirac(const PhaseGrid& grid, const Vec& x,
                               const Vec& v) {
  GridMeasure m(grid);
  m.weights[grid.nearest_state(x, v)] = 1.0;
  return m;
}

GridMeasure GridMeasure::uniform(const PhaseGrid& grid) {
  GridMeasure m(grid);
  double w = 1.0 / grid.num_states();
  for (double& e : m.weights) e = w;
  return m;
}

GridMeasure GridMeasure::uniform_x_rest(const PhaseGrid& grid) {
  GridMeasure m(grid);
  int vi[kMaxDim] = {grid.v_zero_index(), grid.v_zero_index()};
  double w = 1.0 / grid.num_x();
  for (int xf = 0; xf < grid.num_x(); ++xf) {
    int xi[kMaxDim] = {0, 0};
    if (grid.dim() == 1) {
      xi[0] = xf;
    } else {
      xi[0] = xf / grid.spec().n_x;
      xi[1] = xf % grid.spec().n_x;
    }
    m.weights[grid.state_id(xi, vi)] = w;
  }
  return m;
}

double GridMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

bool GridMeasure::is_normalized(double tol) const {
  for (double w : weights)
    if (w < -tol) return false;
  return std::abs(total_mass() - 1.0) <= tol;
}

void GridMeasure::normalize() {
  double s = total_mass();
  if (s <= 0) throw std::domain_error("GridMeasure::normalize: no mass");
  for (double& w : weights) w = std::max(w, 0.0) / s;
}

double GridMeasure::second_moment(const PhaseGrid& grid) const {
  double s = 0.0;
  for (int sid = 0; sid < grid.num_states(); ++sid) {
    if (weights[sid] == 0.0) continue;
    Vec x, v;
    grid.state_coords(sid, &x, &v);
    s += weights[sid] * norm2sq(v, grid.dim());
  }
  return s;
}

double GridMeasure::boundary_mass_fraction(const PhaseGrid& grid) const {
  double s = 0.0;
  const double thr = 0.9 * grid.v_max();
  for (int sid = 0; sid < grid.num_states(); ++sid) {
    if (weights[sid] == 0.0) continue;
    Vec x, v;
    grid.state_coords(sid, &x, &v);
    for (int a = 0; a < grid.dim(); ++a)
      if (std::abs(v[a]) >= thr - 1e-15) {
        s += weights[sid];
        break;
      }
  }
  return s;
}

ControlMeasure ControlMeasure::dirac(const PhaseGrid& grid, const Vec& x,
                                     const Vec& v, const Vec& w) {
  ControlMeasure m(grid);
  int sid = grid.nearest_state(x, v);
  int wf = grid.nearest_control(w);
  m.weights[static_cast<std::size_t>(sid) * grid.num_w() + wf] = 1.0;
  return m;
}

double ControlMeasure::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

bool ControlMeasure::is_normalized(double tol) const {
  for (double w : weights)
    if (w < -tol) return false;
  return std::abs(total_mass() - 1.0) <= tol;
}

GridMeasure ControlMeasure::xv_marginal(const PhaseGrid& grid) const {
  GridMeasure m(grid);
  const int nw = grid.num_w();
  for (int s = 0; s < grid.num_states(); ++s) {
    double acc = 0.0;
    for (int w = 0; w < nw; ++w)
      acc += weights[static_cast<std::size_t>(s) * nw + w];
    m.weights[s] = acc;
  }
  return m;
}

double ControlMeasure::integrate_pairs(
    const std::vector<double>& pair_cost) const {
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] != 0.0) s += weights[i] * pair_cost[i];
  return s;
}

GridMeasure FlowMeasure::initial_marginal(const PhaseGrid& grid) const {
  if (steps.empty()) throw std::domain_error("FlowMeasure: empty flow");
  return steps.front().xv_marginal(grid);
}

double closedness_residual(const ControlMeasure& mu,
                           const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  std::vector<double> inflow;
  kernel.push_pairs(mu.weights, &inflow);
  GridMeasure outflow = mu.xv_marginal(grid);
  double worst = 0.0;
  for (int s = 0; s < grid.num_states(); ++s)
    worst = std::max(worst, std::abs(inflow[s] - outflow.weights[s]));
  return worst;
}

double flow_residual(const FlowMeasure& flow, const GridMeasure& m0,
                     const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  double worst = 0.0;
  GridMeasure cur = flow.initial_marginal(grid);
  for (int s = 0; s < grid.num_states(); ++s)
    worst = std::max(worst, std::abs(cur.weights[s] - m0.weights[s]));
  std::vector<double> pushed;
  for (int t = 0; t < flow.num_steps(); ++t) {
    kernel.push_pairs(flow.steps[t].weights, &pushed);
    const std::vector<double>& next =
        t + 1 < flow.num_steps()
            ? flow.steps[t + 1].xv_marginal(grid).weights
            : flow.terminal.weights;
    for (int s = 0; s < grid.num_states(); ++s)
      worst = std::max(worst, std::abs(pushed[s] - next[s]));
  }
  return worst;
}

}  // namespace accmfg
