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

#include "accmfg/flow_lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "accmfg/curve.hpp"

namespace accmfg {

FlowSolveResult solve_finite_horizon_lp(const TimeCost& F,
                                        const ValueField& g,
                                        const GridMeasure& m0, double T,
                                        const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  const double h = grid.h();
  if (!m0.is_normalized(1e-9))
    throw std::invalid_argument("solve_finite_horizon_lp: m0 not normalized");

  FiniteHorizonOptions opts;
  opts.keep_policy = true;
  FiniteHorizonResult dp = solve_finite_horizon(F, g, T, kernel, opts);

  FlowSolveResult out;
  out.flow.h = h;
  out.flow.steps.reserve(dp.num_steps);

  const int nw = grid.num_w();
  std::vector<double> mass = m0.weights;
  double value = 0.0;
  for (int t = 0; t < dp.num_steps; ++t) {
    ControlMeasure mu(grid);
    const std::vector<double>& running = F(t);
    for (int s = 0; s < grid.num_states(); ++s) {
      if (mass[s] == 0.0) continue;
      int w = dp.policy[t][s];
      mu.weights[static_cast<std::size_t>(s) * nw + w] = mass[s];
      value += h * mass[s] * (grid.control_cost()[w] + running[s]);
    }
    std::vector<double> pushed;
    kernel.push_policy(mass, dp.policy[t], &pushed);
    mass.swap(pushed);
    out.flow.steps.push_back(std::move(mu));
  }
  out.flow.terminal.weights = mass;
  for (int s = 0; s < grid.num_states(); ++s)
    value += mass[s] * g.values[s];
  out.value = value;
  return out;
}

FlowSolveResult solve_finite_horizon_lp(const CostField& F,
                                        const ValueField& g,
                                        const GridMeasure& m0, double T,
                                        const TransitionKernel& kernel) {
  ValueField table = F.on_grid(kernel.grid());
  auto cost = [&table](int) -> const std::vector<double>& {
    return table.values;
  };
  return solve_finite_horizon_lp(cost, g, m0, T, kernel);
}

double flow_cost(const FlowMeasure& flow, const TimeCost& F,
                 const ValueField& g, const PhaseGrid& grid) {
  const int nw = grid.num_w();
  double value = 0.0;
  for (int t = 0; t < flow.num_steps(); ++t) {
    const std::vector<double>& running = F(t);
    const ControlMeasure& mu = flow.steps[t];
    for (int s = 0; s < grid.num_states(); ++s)
      for (int w = 0; w < nw; ++w) {
        double m = mu.weights[static_cast<std::size_t>(s) * nw + w];
        if (m != 0.0)
          value += flow.h * m * (grid.control_cost()[w] + running[s]);
      }
  }
  for (int s = 0; s < grid.num_states(); ++s)
    value += flow.terminal.weights[s] * g.values[s];
  return value;
}

double flow_cost(const FlowMeasure& flow, const CostField& F,
                 const ValueField& g, const PhaseGrid& grid) {
  ValueField table = F.on_grid(grid);
  auto cost = [&table](int) -> const std::vector<double>& {
    return table.values;
  };
  return flow_cost(flow, cost, g, grid);
}

FlowMeasure concat_flows(const FlowMeasure& a, const FlowMeasure& b,
                         const PhaseGrid& grid) {
  if (a.steps.empty()) return b;
  if (b.steps.empty()) return a;
  if (std::abs(a.h - b.h) > 1e-12)
    throw std::invalid_argument("concat_flows: step lengths differ");
  GridMeasure b0 = b.initial_marginal(grid);
  double worst = 0.0;
  for (int s = 0; s < grid.num_states(); ++s)
    worst = std::max(worst,
                     std::abs(a.terminal.weights[s] - b0.weights[s]));
  if (worst > 1e-10)
    throw std::invalid_argument(
        "concat_flows: terminal/initial marginals mismatch");
  FlowMeasure out = a;
  out.steps.insert(out.steps.end(), b.steps.begin(), b.steps.end());
  out.terminal = b.terminal;
  return out;
}

LinkResult link_measures(const GridMeasure& m1, const GridMeasure& m2,
                         const CostField& F, const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  const int d = grid.dim();
  const double h = grid.h();
  const int steps = static_cast<int>(std::lround(1.0 / h));
  if (std::abs(steps * h - 1.0) > 1e-9)
    throw std::invalid_argument("link_measures: 1/h must be an integer");
  if (!m1.is_normalized(1e-9) || !m2.is_normalized(1e-9))
    throw std::invalid_argument("link_measures: measures not normalized");

  LinkResult out;
  out.flow.h = h;
  out.flow.steps.assign(steps, ControlMeasure(grid));
  out.flow.terminal = GridMeasure(grid);

  const int nx = grid.spec().n_x, nv = grid.spec().n_v, nw = grid.spec().n_w;
  const int nwf = grid.num_w();

  // tolerant trilinear deposit (v and w clamped onto their boxes)
  auto deposit = [&](ControlMeasure* mu, const Vec& xq, const Vec& vq,
                     const Vec& wq, double weight) {
    int xlo[kMaxDim], vlo[kMaxDim], wlo[kMaxDim];
    double xf[kMaxDim], vf[kMaxDim], wf[kMaxDim];
    for (int i = 0; i < d; ++i) {
      double p = wrap01(xq[i]) / grid.dx();
      double fl = std::floor(p);
      xlo[i] = static_cast<int>(fl) % nx;
      xf[i] = p - fl;
      double q = (std::clamp(vq[i], -grid.v_max(), grid.v_max()) +
                  grid.v_max()) / grid.dv();
      vlo[i] = std::min(static_cast<int>(std::floor(q)), nv - 2);
      vf[i] = std::clamp(q - vlo[i], 0.0, 1.0);
      double r = (std::clamp(wq[i], -grid.w_max(), grid.w_max()) +
                  grid.w_max()) / grid.dw();
      wlo[i] = std::min(static_cast<int>(std::floor(r)), std::max(nw - 2, 0));
      wf[i] = nw > 1 ? std::clamp(r - wlo[i], 0.0, 1.0) : 0.0;
    }
    const int corners = 1 << (3 * d);
    for (int cmask = 0; cmask < corners; ++cmask) {
      double wgt = weight;
      int xi[kMaxDim] = {0, 0}, vi[kMaxDim] = {0, 0}, wi[kMaxDim] = {0, 0};
      for (int i = 0; i < d; ++i) {
        bool hx = (cmask >> (3 * i)) & 1;
        bool hv = (cmask >> (3 * i + 1)) & 1;
        bool hw = (cmask >> (3 * i + 2)) & 1;
        xi[i] = hx ? (xlo[i] + 1) % nx : xlo[i];
        vi[i] = hv ? std::min(vlo[i] + 1, nv - 1) : vlo[i];
        wi[i] = hw ? std::min(wlo[i] + 1, nw - 1) : wlo[i];
        wgt *= hx ? xf[i] : 1.0 - xf[i];
        wgt *= hv ? vf[i] : 1.0 - vf[i];
        wgt *= hw ? wf[i] : 1.0 - wf[i];
      }
      if (wgt == 0.0) continue;
      int sid = grid.state_id(xi, vi);
      mu->weights[static_cast<std::size_t>(sid) * nwf +
                  grid.control_flat(wi)] += wgt;
    }
  };

  for (int i = 0; i < grid.num_states(); ++i) {
    if (m1.weights[i] == 0.0) continue;
    Vec xi, vi;
    grid.state_coords(i, &xi, &vi);
    for (int j = 0; j < grid.num_states(); ++j) {
      double pw = m1.weights[i] * m2.weights[j];
      if (pw == 0.0) continue;
      Vec xj, vj;
      grid.state_coords(j, &xj, &vj);
      Curve sigma = connect_cubic(xi, vi, xj, vj, 1.0, d);
      out.cost += pw * evaluate_cost(sigma, F, h);

      // time-slice deposits at the step starts: slice 0 sits exactly on the
      // node of i, so the initial marginal reproduces m1 exactly
      const Curve::Segment& seg = sigma.segments().front();
      for (int t = 0; t < steps; ++t) {
        double u = t * h;
        Vec x, v, w;
        for (int a = 0; a < d; ++a) {
          x[a] = seg.x0[a] + seg.v0[a] * u + 0.5 * seg.a[a] * u * u +
                 seg.b[a] * u * u * u / 6.0;
          v[a] = seg.v0[a] + seg.a[a] * u + 0.5 * seg.b[a] * u * u;
          w[a] = seg.a[a] + seg.b[a] * u;
        }
        deposit(&out.flow.steps[t], x, v, w, pw);
      }
      // the connector ends exactly on the node of j
      out.flow.terminal.weights[j] += pw;
    }
  }

  for (ControlMeasure& mu : out.flow.steps) {
    double mass = mu.total_mass();
    if (mass > 0 && std::abs(mass - 1.0) > 1e-13)
      for (double& wgt : mu.weights) wgt /= mass;
  }
  return out;
}

}  // namespace accmfg
