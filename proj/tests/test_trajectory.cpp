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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "accmfg/trajectory.hpp"

using namespace accmfg;

namespace {
PhaseGrid desk_grid() {
  PhaseGrid::Spec s;
  s.d = 1;
  s.n_x = 16;
  s.v_max = 2.0;
  s.n_v = 17;
  s.w_max = 4.0;
  s.n_w = 9;
  s.h = 0.25;
  return PhaseGrid(s);
}

double riemann_cost(const Curve& c, const CostField& F, int n) {
  // independent fine-step midpoint Riemann sum of |w|^2/2 + F
  double total = 0.0;
  double dt = c.duration() / n;
  for (int k = 0; k < n; ++k) {
    double t = c.t0() + (k + 0.5) * dt;
    Vec x, v, w;
    c.state_at(t, &x, &v, &w);
    Vec xw{wrap01(x[0]), wrap01(x[1])};
    total += dt * (0.5 * norm2sq(w, c.dim()) + F.eval(xw, v));
  }
  return total;
}
}  // namespace

TEST_CASE("connect_cubic: zero displacement is the rest curve") {
  Curve c = connect_cubic(vec1(0.0), vec1(0.0), vec1(0.0), vec1(0.0), 1.0, 1);
  CHECK(c.acceleration_cost() == doctest::Approx(0.0));
  CHECK(c.end_x()[0] == doctest::Approx(0.0));
  CHECK(c.end_v()[0] == doctest::Approx(0.0));
}

TEST_CASE("connect_cubic: half-turn displacement, quadrature oracle") {
  Curve c = connect_cubic(vec1(0.0), vec1(0.0), vec1(0.5), vec1(0.0), 1.0, 1);
  // B = 1.5, C = -1: acceleration 2B + 6Ct = 3 - 6t
  Vec x, v, w;
  c.state_at(0.0, &x, &v, &w);
  CHECK(w[0] == doctest::Approx(3.0));
  c.state_at(1.0, &x, &v, &w);
  CHECK(x[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(v[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(w[0] == doctest::Approx(-3.0));
  // oracle: numerical quadrature of (3 - 6t)^2 / 2 = 1.5
  double quad = 0.0;
  int n = 20000;
  for (int k = 0; k < n; ++k) {
    double t = (k + 0.5) / n;
    double a = 3.0 - 6.0 * t;
    quad += 0.5 * a * a / n;
  }
  CHECK(c.acceleration_cost() == doctest::Approx(quad).epsilon(1e-8));
  CHECK(c.acceleration_cost() == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("connect_cubic: same state with velocity, forced coefficients") {
  // (0,1) -> (0,1), theta = 1, dx = 0: B = -3, C = 2
  Curve c = connect_cubic(vec1(0.0), vec1(1.0), vec1(0.0), vec1(1.0), 1.0, 1);
  Vec x, v, w;
  c.state_at(0.0, &x, &v, &w);
  CHECK(w[0] == doctest::Approx(-6.0));  // 2B
  c.state_at(1.0, &x, &v, &w);
  CHECK(v[0] == doctest::Approx(1.0).epsilon(1e-14));  // 1 - 6 + 6
  CHECK(x[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(
      connect_cubic(vec1(0.0), vec1(0.0), vec1(0.1), vec1(0.0), 0.0, 1),
      std::invalid_argument);
}

TEST_CASE("connect_cubic endpoint identities on 1000 random inputs") {
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> ux(0.0, 1.0), uv(-2.0, 2.0),
      ut(0.25, 4.0);
  double worst = 0.0;
  double c2 = 0.0;
  for (int k = 0; k < 1000; ++k) {
    Vec x0{ux(rng), ux(rng)}, v0{uv(rng), uv(rng)};
    Vec x1{ux(rng), ux(rng)}, v1{uv(rng), uv(rng)};
    double theta = ut(rng);
    Curve c = connect_cubic(x0, v0, x1, v1, theta, 2);
    Vec xe = c.end_x(), ve = c.end_v();
    for (int i = 0; i < 2; ++i) {
      worst = std::max(worst, torus_dist1(xe[i], x1[i]));
      worst = std::max(worst, std::abs(ve[i] - v1[i]));
    }
    // cost-bound shape of the reachability lemma: J <= C2 (R^2/theta + R^a theta)
    double r = std::max({1.0, norm2(v0, 2), norm2(v1, 2)});
    double bound_shape = r * r / theta + r * r * theta;
    c2 = std::max(c2, c.acceleration_cost() / bound_shape);
  }
  CHECK(worst <= 1e-12);
  CHECK(c2 < 40.0);  // a single fitted constant covers the whole sample
}

TEST_CASE("lifted connector keeps cruising through integer turns") {
  // straight line with v = 1 closes on the torus: lift k = 1, cost 0
  Curve c =
      connect_cubic_lifted(vec1(0.0), vec1(1.0), vec1(0.0), vec1(1.0), 1.0, 1);
  CHECK(c.acceleration_cost() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(c.end_x()[0] == doctest::Approx(1.0));  // unwrapped
  CHECK(c.end_v()[0] == doctest::Approx(1.0));
}

TEST_CASE("evaluate_cost examples") {
  CostField quad = make_cost_field("quad", {}, 1);
  CostField quad_shift = make_cost_field("quad_shift", {{"c", 1.0}}, 1);

  Curve rest(1, 0.0, vec1(0.3), vec1(0.0));
  rest.append_constant(2.0, vec1(0.0));
  CHECK(evaluate_cost(rest, quad) == doctest::Approx(0.0));

  Curve cruise(1, 0.0, vec1(0.0), vec1(1.0));
  cruise.append_constant(2.0, vec1(0.0));
  CHECK(evaluate_cost(cruise, quad) == doctest::Approx(2.0).epsilon(1e-13));

  // connector: 1.5 + integral of |sigma_dot|^2, against a fine Riemann sum
  Curve c = connect_cubic(vec1(0.0), vec1(0.0), vec1(0.5), vec1(0.0), 1.0, 1);
  double mine = evaluate_cost(c, quad);
  double oracle = riemann_cost(c, quad, 2000000);
  CHECK(mine == doctest::Approx(oracle).epsilon(1e-8));

  // additivity over concatenation is exact
  Curve left = c.prefix(0.5);
  Vec x, v, w;
  c.state_at(0.5, &x, &v, &w);
  Curve right(1, 0.5, left.end_x(), left.end_v());
  // rebuild the remaining half as an affine segment with matched start
  const Curve::Segment& seg = c.segments()[0];
  Vec a_mid{seg.a[0] + seg.b[0] * 0.5, 0.0};
  right.append_affine(0.5, a_mid, seg.b);
  Curve glued = Curve::concat(left, right);
  CHECK(evaluate_cost(glued, quad_shift) ==
        doctest::Approx(evaluate_cost(left, quad_shift) +
                        evaluate_cost(right, quad_shift))
            .epsilon(1e-14));
}

TEST_CASE("minimize_horizon examples") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);

  CostField quad = make_cost_field("quad", {}, 1);
  MinimizeResult rest =
      minimize_horizon(vec1(0.3125), vec1(0.0), 4.0, quad,
                       TerminalCost::zero(), nullptr, k);
  CHECK(rest.value == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(evaluate_cost(rest.curve, quad) == doctest::Approx(0.0));

  CostField qs = make_cost_field("quad_shift", {{"c", 0.7}}, 1);
  MinimizeResult shifted =
      minimize_horizon(vec1(0.3125), vec1(0.0), 4.0, qs,
                       TerminalCost::zero(), nullptr, k);
  CHECK(shifted.value == doctest::Approx(0.7 * 4.0).epsilon(1e-12));

  // value agrees with the grid solver at the start node (same machinery)
  CostField well = make_cost_field("well", {}, 1);
  FiniteHorizonResult dp =
      solve_finite_horizon(well, ValueField(g, 0.0), 8.0, k);
  MinimizeResult mh = minimize_horizon(vec1(0.0), vec1(0.0), 8.0, well,
                                       TerminalCost::zero(), nullptr, k);
  int sid = g.nearest_state(vec1(0.0), vec1(0.0));
  CHECK(mh.value == doctest::Approx(dp.v0.values[sid]).epsilon(1e-10));
  // strictly better than resting at the start (F(0,0) = 2 per unit time)
  CHECK(mh.value < 2.0 * 8.0);
  CHECK(mh.value >= 0.0);

  // DP optimality on the chain: no competitor control sequence along the
  // chain accounting beats the DP value
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> pick_w(0, g.num_w() - 1);
  for (int rep = 0; rep < 20; ++rep) {
    Vec x = vec1(0.0), v = vec1(0.0);
    double chain_cost = 0.0;
    bool feasible = true;
    for (int t = 0; t < 32 && feasible; ++t) {
      int wf = pick_w(rng);
      Vec w = g.control_coords(wf);
      if (std::abs(v[0] + g.h() * w[0]) > g.v_max()) {
        wf = g.w_zero_index();
        w = g.control_coords(wf);
      }
      chain_cost += g.h() * (g.control_cost()[wf] + well.eval(x, v));
      x[0] = wrap01(x[0] + g.h() * v[0]);
      v[0] += g.h() * w[0];
    }
    CHECK(mh.value <= chain_cost + 1e-10);
  }
}

TEST_CASE("lemma-style upper bound: value/T <= c_F (1 + R^alpha)") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  CostField well = make_cost_field("well", {}, 1);
  for (double speed : {0.0, 1.0, 2.0}) {
    MinimizeResult r = minimize_horizon(vec1(0.25), vec1(speed), 8.0, well,
                                        TerminalCost::zero(), nullptr, k);
    double bound = well.c_F * (1.0 + speed * speed);
    CHECK(r.value / 8.0 <= bound + 1e-9);
  }
}

TEST_CASE("bounded oscillation of V^T over compact sets, uniform in T") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  CostField well = make_cost_field("well", {}, 1);
  double prev_osc = 0.0;
  for (double T : {8.0, 16.0, 32.0}) {
    FiniteHorizonResult dp =
        solve_finite_horizon(well, ValueField(g, 0.0), T, k);
    double lo = 1e300, hi = -1e300;
    for (int s = 0; s < g.num_states(); ++s) {
      Vec x, v;
      g.state_coords(s, &x, &v);
      if (std::abs(v[0]) > 1.0 + 1e-12) continue;
      lo = std::min(lo, dp.v0.values[s]);
      hi = std::max(hi, dp.v0.values[s]);
    }
    double osc = hi - lo;
    CHECK(osc < 25.0);  // uniformly bounded, not growing with T
    if (prev_osc > 0) CHECK(osc <= prev_osc * 1.2 + 1e-9);
    prev_osc = osc;
  }
}

TEST_CASE("make_periodic: already periodic curves are unchanged in cost") {
  CostField quad = make_cost_field("quad", {}, 1);

  Curve rest(1, 0.0, vec1(0.4), vec1(0.0));
  rest.append_constant(4.0, vec1(0.0));
  Curve p = make_periodic(rest);
  CHECK(p.duration() == doctest::Approx(4.0));
  CHECK(torus_dist1(p.end_x()[0], 0.4) <= 1e-12);
  CHECK(p.end_v()[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(evaluate_cost(p, quad) - evaluate_cost(rest, quad) ==
        doctest::Approx(0.0).epsilon(1e-12));

  // straight line with v = 1 over T = 3 closes by torus periodicity
  Curve line(1, 0.0, vec1(0.0), vec1(1.0));
  line.append_constant(3.0, vec1(0.0));
  Curve lp = make_periodic(line);
  CHECK(torus_dist1(lp.end_x()[0], 0.0) <= 1e-12);
  CHECK(lp.end_v()[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(evaluate_cost(lp, quad) - evaluate_cost(line, quad) ==
        doctest::Approx(0.0).epsilon(1e-11));

  CHECK_THROWS_AS(make_periodic(rest.prefix(1.0)), std::invalid_argument);
}

TEST_CASE("make_periodic: surgery on an optimal curve, cost-bound shape") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  CostField well = make_cost_field("well", {}, 1);
  const double T = 8.0, lambda_cut = 2.0;
  MinimizeResult mh = minimize_horizon(vec1(0.0), vec1(1.0), T, well,
                                       TerminalCost::zero(), nullptr, k);
  Curve p = make_periodic(mh.curve, lambda_cut);
  CHECK(p.duration() == doctest::Approx(T));
  CHECK(torus_dist1(p.end_x()[0], 0.0) <= 1e-12);
  CHECK(p.end_v()[0] == doctest::Approx(1.0).epsilon(1e-12));
  // added cost obeys the surgery bound shape C3 (lambda^2 R0^2 + R0^a T / lambda^a)
  double added = evaluate_cost(p, well) - evaluate_cost(mh.curve, well);
  double r0 = 1.0;
  double shape = lambda_cut * lambda_cut * r0 * r0 +
                 r0 * r0 * T / (lambda_cut * lambda_cut);
  CHECK(added <= 40.0 * shape);
  CHECK(added > -1e-9);
}

TEST_CASE("occupation measure: rest atom and cruise loop") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);

  Curve rest(1, 0.0, vec1(0.25), vec1(0.0));
  rest.append_constant(2.0, vec1(0.0));
  ControlMeasure mu = occupation_measure(rest, g);
  CHECK(mu.is_normalized(1e-12));
  int sid = g.nearest_state(vec1(0.25), vec1(0.0));
  int wi0[2] = {g.w_zero_index(), g.w_zero_index()};
  CHECK(mu.weights[static_cast<std::size_t>(sid) * g.num_w() +
                   g.control_flat(wi0)] == doctest::Approx(1.0));
  CHECK(closedness_residual(mu, k) == doctest::Approx(0.0).epsilon(1e-12));

  // constant-velocity loop: uniform mass over the x-line at v = 1, w = 0
  Curve loop(1, 0.0, vec1(0.0), vec1(1.0));
  loop.append_constant(1.0, vec1(0.0));
  ControlMeasure lm = occupation_measure(loop, g, g.h());
  CHECK(lm.is_normalized(1e-12));
  GridMeasure marg = lm.xv_marginal(g);
  // all mass sits on the v = 1 row
  double row_mass = 0.0;
  for (int xf = 0; xf < g.spec().n_x; ++xf) {
    int xi[2] = {xf, 0};
    int vi[2] = {g.v_zero_index() + 4, 0};  // v = 1 at dv = 0.25
    row_mass += marg.weights[g.state_id(xi, vi)];
  }
  CHECK(row_mass == doctest::Approx(1.0).epsilon(1e-12));

  Curve fast(1, 0.0, vec1(0.0), vec1(2.5));
  fast.append_constant(1.0, vec1(0.0));
  CHECK_THROWS_AS(occupation_measure(fast, g), std::out_of_range);
}
