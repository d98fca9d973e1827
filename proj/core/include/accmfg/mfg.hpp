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

#ifndef ACCMFG_MFG_HPP
#define ACCMFG_MFG_HPP

#include <vector>

#include "accmfg/ergodic_lp.hpp"
#include "accmfg/flow_lp.hpp"
#include "accmfg/wasserstein.hpp"

namespace accmfg {

/// Fictitious-play damping. The first step always uses beta = 1, so the
/// averaged measure stays consistent with the averaged marginal.
struct DampingSchedule {
  enum class Kind { harmonic, fixed };
  Kind kind = Kind::harmonic;
  double beta = 0.5;  // used by Kind::fixed

  double operator()(int k) const {
    if (k == 0) return 1.0;
    return kind == Kind::harmonic ? 1.0 / (k + 1.0) : beta;
  }
};

struct BestResponseResult {
  double lambda = 0.0;   // Lambda(m), the minimum of the frozen LP
  ErgodicSolution lp;    // minimizer and certificates
};

/// Freezes F(., ., m) and delegates to the ergodic LP.
BestResponseResult best_response(const GridMeasure& m,
                                 const MeanFieldCoupling& coupling,
                                 const TransitionKernel& kernel, double tol,
                                 const ErgodicLPOptions& lp_options = {});

struct ErgodicMFGOptions {
  DampingSchedule damping{DampingSchedule::Kind::fixed, 0.5};
  double tol = 1e-4;
  int max_iterations = 400;
  /// The iteration stops once the marginal residual is below tol divided by
  /// this factor; the slack absorbs the Lipschitz constant of Lambda(m), so
  /// that lambda agrees across initializations within 2 tol.
  double residual_safety = 8.0;
  ErgodicLPOptions lp;
  int monotonicity_pairs = 32;  // 0 disables the pre-check
};

struct ErgodicMFGSolution {
  double lambda_bar = 0.0;
  ControlMeasure mu_bar;
  GridMeasure m_bar;  // = pi # mu_bar
  int iterations = 0;
  double fixed_point_residual = 0.0;  // d1(pi # BestResponse(m_bar), m_bar)
  double value_gap = 0.0;  // |Lambda(m_bar) - cost(mu_bar; m_bar)|
  std::vector<double> lambda_history;
  bool converged = false;
  bool monotonicity_warning = false;
  double boundary_mass = 0.0;  // velocity-box truncation-quality indicator
  double second_moment = 0.0;  // M2(m_bar), bounded by 2 c_F^2 in theory
};

/// Damped best-response iteration
///   m_{k+1} = (1 - beta_k) m_k + beta_k pi # BestResponse(m_k)
/// with the measure averaged alongside its marginal. Non-convergence is a
/// flagged result, never an exception.
ErgodicMFGSolution solve_ergodic_mfg(const MeanFieldCoupling& coupling,
                                     const TransitionKernel& kernel,
                                     const GridMeasure& m_init,
                                     const ErgodicMFGOptions& options = {});

struct MFGTimeOptions {
  DampingSchedule damping{DampingSchedule::Kind::fixed, 0.5};
  double tol = 1e-4;
  int max_iterations = 200;
};

struct MFGTimeSolution {
  std::vector<ValueField> u;        // t = 0..N
  std::vector<GridMeasure> m_flow;  // t = 0..N
  double picard_residual = 0.0;     // sup_t d1 between successive m-flows
  double value0 = 0.0;              // <u(0,.,.), m0>
  int iterations = 0;
  bool converged = false;
  double horizon = 0.0;
};

/// Fictitious play for the time-dependent system: backward value sweep with
/// the frozen flow costs, forward transport of m0 through the argmin
/// controls (mass is conserved exactly), damped averaging of the m-flow.
/// Requires alpha = 2 on the base cost.
MFGTimeSolution solve_mfg_time(const MeanFieldCoupling& coupling,
                               const TerminalCost& g, const GridMeasure& m0,
                               double T, const TransitionKernel& kernel,
                               const MFGTimeOptions& options = {});

struct LongTimeRow {
  double T = 0.0;
  double value0_over_T = 0.0;
  double gap = 0.0;        // |value0/T - lambda_bar|
  double probe_sup = 0.0;  // sup over probe nodes of |u(0)/T - lambda_bar|
  bool converged = false;
};

std::vector<LongTimeRow> long_time_average_experiment(
    const MeanFieldCoupling& coupling, const TerminalCost& g,
    const GridMeasure& m0, const std::vector<double>& horizons,
    const TransitionKernel& kernel, double lambda_bar,
    const MFGTimeOptions& options = {});

struct EnergyDiagnostic {
  double l2_integral = 0.0;  // int_0^T ||F(m_t) - F(m_bar)||_{L2(grid)}^2 dt
  double weighted_sup_integral = 0.0;
  // int_0^T sup_s |dF|^{2d+2} / (1 + |v|^2)^{2d} dt
};

EnergyDiagnostic energy_diagnostic(const MFGTimeSolution& sol,
                                   const GridMeasure& m_bar,
                                   const MeanFieldCoupling& coupling,
                                   const PhaseGrid& grid);

/// max over (x,v), (x',v') with |v|, |v'| <= R of u(0,x,v) - u(0,x',v').
double oscillation_report(const MFGTimeSolution& sol, double R,
                          const PhaseGrid& grid);

}  // namespace accmfg

#endif  // ACCMFG_MFG_HPP
