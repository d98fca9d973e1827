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

#include "accmfg/mfg.hpp"

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
}  // namespace

TEST_CASE("best response with zero coupling equals the static LP bitwise") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling none = make_coupling("well", {}, 1);  // c = 0
  CostField well = make_cost_field("well", {}, 1);
  ErgodicSolution direct = solve_ergodic(well, k, 1e-9);
  for (const GridMeasure& m :
       {GridMeasure::uniform(g), GridMeasure::uniform_x_rest(g)}) {
    BestResponseResult br = best_response(m, none, k, 1e-9);
    CHECK(br.lambda == direct.lambda);  // bitwise: same code path
    CHECK(br.lp.mu.weights == direct.mu.weights);
  }
}

TEST_CASE("ergodic MFG with zero coupling converges immediately") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling none = make_coupling("well", {}, 1);
  ErgodicMFGOptions opts;
  opts.tol = 1e-6;
  ErgodicMFGSolution sol =
      solve_ergodic_mfg(none, k, GridMeasure::uniform(g), opts);
  CHECK(sol.converged);
  CHECK(sol.iterations == 2);  // init drops after the first beta = 1 step
  CHECK(sol.lambda_bar == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sol.fixed_point_residual <= opts.tol);
  CHECK(closedness_residual(sol.mu_bar, k) <= 1e-10);
}

TEST_CASE("weak congestion raises the ergodic constant") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling weak = make_coupling("congestion", {{"c", 0.1}}, 1);
  ErgodicMFGOptions opts;
  opts.tol = 1e-4;
  ErgodicMFGSolution sol =
      solve_ergodic_mfg(weak, k, GridMeasure::uniform(g), opts);
  CHECK(sol.converged);
  CHECK(!sol.monotonicity_warning);
  // lambda(f0) = 0 for the well; a pointwise-nonnegative coupling can only
  // raise the equilibrium value
  CHECK(sol.lambda_bar >= -1e-10);
  CHECK(sol.lambda_bar == doctest::Approx(0.2).epsilon(2e-3));
  CHECK(sol.second_moment <=
        2.0 * weak.base.c_F * weak.base.c_F + 1e-9);
}

TEST_CASE("congestion equilibrium is initialization independent") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling cong = make_coupling("congestion", {{"c", 1.0}}, 1);
  ErgodicMFGOptions opts;
  opts.tol = 1e-4;
  ErgodicMFGSolution a =
      solve_ergodic_mfg(cong, k, GridMeasure::uniform(g), opts);
  ErgodicMFGSolution b =
      solve_ergodic_mfg(cong, k, GridMeasure::uniform_x_rest(g), opts);
  CHECK(a.converged);
  CHECK(b.converged);
  CHECK(std::abs(a.lambda_bar - b.lambda_bar) <= 2.0 * opts.tol);
  CHECK(a.fixed_point_residual <= opts.tol);
  CHECK(a.value_gap <= opts.tol * (1.0 + std::abs(a.lambda_bar)));
  // fixed-point consistency: re-running the best response moves lambda by
  // no more than tol
  BestResponseResult re = best_response(a.m_bar, cong, k, 1e-9);
  CHECK(std::abs(re.lambda - a.lambda_bar) <= opts.tol);
  // the analytic equilibrium is the atom at the well bottom: lambda = 2
  CHECK(a.lambda_bar == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("non-monotone toy proceeds with a warning flag") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling toy = make_coupling("nonmonotone_toy", {}, 1);
  ErgodicMFGOptions opts;
  opts.tol = 1e-3;
  opts.max_iterations = 30;
  ErgodicMFGSolution sol =
      solve_ergodic_mfg(toy, k, GridMeasure::uniform(g), opts);
  CHECK(sol.monotonicity_warning);
}

TEST_CASE("time-dependent MFG with zero coupling is the static problem") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling none = make_coupling("well", {}, 1);
  GridMeasure m0 = GridMeasure::dirac(g, vec1(0.0), vec1(0.0));
  MFGTimeSolution sol =
      solve_mfg_time(none, TerminalCost::zero(), m0, 4.0, k);
  CHECK(sol.converged);
  CHECK(sol.iterations == 2);
  CostField well = make_cost_field("well", {}, 1);
  FiniteHorizonResult dp =
      solve_finite_horizon(well, ValueField(g, 0.0), 4.0, k);
  for (int s = 0; s < g.num_states(); s += 5)
    CHECK(sol.u[0].values[s] == dp.v0.values[s]);
  // mass conservation along the transported flow
  for (const GridMeasure& m : sol.m_flow) {
    CHECK(m.is_normalized(1e-12));
    for (double w : m.weights) CHECK(w >= -1e-15);
  }
}

TEST_CASE("time-dependent MFG: shifted quadratic value is c T") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling qs = make_coupling("quad_shift", {{"c", 1.0}}, 1);
  GridMeasure m0 = GridMeasure::dirac(g, vec1(0.25), vec1(0.0));
  MFGTimeSolution sol = solve_mfg_time(qs, TerminalCost::zero(), m0, 4.0, k);
  CHECK(sol.value0 == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("frozen-coupling flow LP equality at the fixed point") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling cong = make_coupling("congestion", {{"c", 1.0}}, 1);
  GridMeasure m0 = GridMeasure::uniform_x_rest(g);
  // the equilibrium cost is flat in x at c = 1, so the best response jumps
  // between targets; a small fixed damping settles the averaged flow
  MFGTimeOptions opts;
  opts.tol = 2e-3;
  opts.damping = {DampingSchedule::Kind::fixed, 0.05};
  MFGTimeSolution sol =
      solve_mfg_time(cong, TerminalCost::zero(), m0, 4.0, k, opts);
  CHECK(sol.converged);
  CHECK(sol.picard_residual <= opts.tol);

  // freeze the converged flow costs and re-solve as a transport program:
  // the value must reproduce <u(0), m0> to 1e-8 relative
  const int n = static_cast<int>(sol.m_flow.size()) - 1;
  std::vector<std::vector<double>> tables(n);
  for (int t = 0; t < n; ++t)
    tables[t] = cong.freeze(sol.m_flow[t], g).on_grid(g).values;
  auto running = [&tables](int t) -> const std::vector<double>& {
    return tables[t];
  };
  FlowSolveResult lp = solve_finite_horizon_lp(
      running, TerminalCost::zero().freeze(sol.m_flow[n], g), m0, 4.0, k);
  CHECK(lp.value ==
        doctest::Approx(sol.value0).epsilon(1e-8));
}

TEST_CASE("long-time averages approach the ergodic constant") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling none = make_coupling("quad_shift", {{"c", 1.0}}, 1);
  GridMeasure m0 = GridMeasure::dirac(g, vec1(0.0), vec1(0.0));
  // lambda_bar = 1 for the uncoupled shifted quadratic
  std::vector<LongTimeRow> rows = long_time_average_experiment(
      none, TerminalCost::zero(), m0, {2.0, 4.0, 8.0}, k, 1.0);
  for (const LongTimeRow& row : rows) {
    CHECK(row.converged);
    CHECK(row.gap <= 1e-10);  // value0 = c T exactly at the rest start
  }
}

TEST_CASE("energy diagnostic vanishes without coupling drift") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling cong = make_coupling("congestion", {{"c", 1.0}}, 1);
  GridMeasure m_bar = GridMeasure::dirac(g, vec1(0.5), vec1(0.0));

  // inject an artificial flow identically equal to m_bar: both zero
  MFGTimeSolution fake;
  fake.m_flow.assign(9, m_bar);
  fake.u.assign(9, ValueField(g, 0.0));
  fake.horizon = 2.0;
  EnergyDiagnostic e = energy_diagnostic(fake, m_bar, cong, g);
  CHECK(e.l2_integral == doctest::Approx(0.0));
  CHECK(e.weighted_sup_integral == doctest::Approx(0.0));

  // c = 0: any flow produces zero difference
  MeanFieldCoupling none = make_coupling("well", {}, 1);
  MFGTimeSolution sol = solve_mfg_time(
      none, TerminalCost::zero(), GridMeasure::uniform_x_rest(g), 2.0, k);
  EnergyDiagnostic e0 = energy_diagnostic(sol, GridMeasure::uniform(g), none,
                                          g);
  CHECK(e0.l2_integral == doctest::Approx(0.0));
  CHECK(e0.weighted_sup_integral == doctest::Approx(0.0));
}

TEST_CASE("oscillation report") {
  PhaseGrid g = desk_grid();
  TransitionKernel k(g);
  MeanFieldCoupling none = make_coupling("well", {}, 1);
  MFGTimeSolution sol = solve_mfg_time(
      none, TerminalCost::zero(), GridMeasure::uniform_x_rest(g), 4.0, k);
  // single-node ball: zero oscillation
  CHECK(oscillation_report(sol, 0.0, g) >= 0.0);
  double full = oscillation_report(sol, 2.0, g);
  double small = oscillation_report(sol, 1.0, g);
  CHECK(small <= full + 1e-12);  // monotone in R
}
