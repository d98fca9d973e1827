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

#include "accmfg/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace accmfg {

namespace {
constexpr double kGaussNode[3] = {0.1127016653792583, 0.5,
                                  0.8872983346207417};
constexpr double kGaussWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
}  // namespace

MinimizeResult minimize_horizon(const Vec& x0, const Vec& v0, double T,
                                const CostField& F, const TerminalCost& g,
                                const GridMeasure* terminal_measure,
                                const TransitionKernel& kernel) {
  const PhaseGrid& grid = kernel.grid();
  const int d = grid.dim();
  const double h = grid.h();
  if (!grid.v_in_box(v0))
    throw std::out_of_range("minimize_horizon: v0 outside the grid box");

  ValueField gfield(grid, 0.0);
  if (!g.is_zero()) {
    for (int s = 0; s < grid.num_states(); ++s) {
      Vec x, v;
      grid.state_coords(s, &x, &v);
      gfield.values[s] = g.eval(x, v, terminal_measure, &grid);
    }
  }

  FiniteHorizonOptions opts;
  opts.keep_slab = true;
  FiniteHorizonResult dp = solve_finite_horizon(F, gfield, T, kernel, opts);

  MinimizeResult out{Curve(d, 0.0, x0, v0), interpolate(dp.v0, grid, x0, v0)};

  Vec x = x0, v = v0;
  Curve& curve = out.curve;
  for (int t = 0; t < dp.num_steps; ++t) {
    const ValueField& next = dp.slab[t + 1];
    double best = std::numeric_limits<double>::infinity();
    int best_w = -1;
    for (int wf = 0; wf < grid.num_w(); ++wf) {
      Vec w = grid.control_coords(wf);
      Vec vn = v;
      bool ok = true;
      for (int i = 0; i < d; ++i) {
        vn[i] += h * w[i];
        ok = ok && std::abs(vn[i]) <= grid.v_max() + 1e-9 * grid.v_max();
      }
      if (!ok) continue;
      Vec xn = x;
      for (int i = 0; i < d; ++i) xn[i] += h * v[i];
      double q = h * (grid.control_cost()[wf] + F.eval(x, v)) +
                 interpolate(next, grid, xn, vn);
      if (q < best) {
        best = q;
        best_w = wf;
      }
    }
    Vec w = grid.control_coords(best_w);
    curve.append_constant(h, w);
    for (int i = 0; i < d; ++i) {
      x[i] += h * v[i];  // chain kinematics, matching the DP stencil
      v[i] += h * w[i];
    }
  }
  return out;
}

Curve make_periodic(const Curve& curve, double lambda_cut) {
  const int d = curve.dim();
  const double T = curve.duration();
  if (T < 2.0)
    throw std::invalid_argument("make_periodic: curve must last at least 2");
  if (lambda_cut < 2.0)
    throw std::invalid_argument("make_periodic: lambda_cut must be >= 2");

  const Vec x_start = curve.start_x();
  const Vec v_start = curve.start_v();
  const double r0 = std::max(1.0, norm2(v_start, d));
  const double threshold = lambda_cut * r0;

  auto speed_at = [&](double t) {
    Vec x, v, w;
    curve.state_at(curve.t0() + t, &x, &v, &w);
    return norm2(v, d);
  };

  // cut time on segment boundaries, restricted to [0, T-1]
  double tau;
  if (speed_at(T - 1.0) <= threshold) {
    tau = T - 1.0;
  } else {
    tau = 0.0;
    double acc = 0.0;
    for (const Curve::Segment& seg : curve.segments()) {
      acc += seg.dt;
      if (acc > T - 1.0 + 1e-12) break;
      if (speed_at(acc) <= threshold) tau = acc;
    }
  }

  Curve head = tau > 1e-12 ? curve.prefix(curve.t0() + tau)
                           : Curve(d, curve.t0(), x_start, v_start);
  Vec xc = head.end_x(), vc = head.end_v();

  if (tau >= T - 2.0) {
    Curve tail = connect_cubic_lifted(xc, vc, x_start, v_start, T - tau, d);
    return head.empty() ? tail : Curve::concat(head, tail);
  }
  Curve bridge = connect_cubic_lifted(xc, vc, x_start, v_start, 1.0, d);
  Curve loop = connect_cubic_lifted(bridge.end_x(), bridge.end_v(), x_start,
                                    v_start, T - tau - 1.0, d);
  Curve tail = Curve::concat(bridge, loop);
  return head.empty() ? tail : Curve::concat(head, tail);
}

ControlMeasure occupation_measure(const Curve& curve, const PhaseGrid& grid,
                                  double quad_step) {
  const int d = grid.dim();
  ControlMeasure mu(grid);
  const double T = curve.duration();
  if (!(T > 0)) throw std::invalid_argument("occupation_measure: empty curve");

  const int nx = grid.spec().n_x, nv = grid.spec().n_v, nw = grid.spec().n_w;
  const int nwf = grid.num_w();

  auto deposit = [&](const Vec& xq, const Vec& vq, const Vec& wq,
                     double weight) {
    if (!grid.v_in_box(vq, 1e-9 * grid.v_max()))
      throw std::out_of_range("occupation_measure: velocity exits the box");
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
      mu.weights[static_cast<std::size_t>(sid) * nwf + grid.control_flat(wi)] +=
          wgt;
    }
  };

  for (const Curve::Segment& seg : curve.segments()) {
    int nsub =
        std::max(1, static_cast<int>(std::ceil(seg.dt / quad_step - 1e-12)));
    double sub = seg.dt / nsub;
    for (int k = 0; k < nsub; ++k)
      for (int q = 0; q < 3; ++q) {
        double u = (k + kGaussNode[q]) * sub;
        Vec x, v, w;
        for (int i = 0; i < d; ++i) {
          x[i] = seg.x0[i] + seg.v0[i] * u + 0.5 * seg.a[i] * u * u +
                 seg.b[i] * u * u * u / 6.0;
          v[i] = seg.v0[i] + seg.a[i] * u + 0.5 * seg.b[i] * u * u;
          w[i] = seg.a[i] + seg.b[i] * u;
        }
        deposit(x, v, w, sub * kGaussWeight[q] / T);
      }
  }

  // exact renormalization of quadrature round-off
  double mass = mu.total_mass();
  if (mass > 0)
    for (double& wgt : mu.weights) wgt /= mass;
  return mu;
}

}  // namespace accmfg
