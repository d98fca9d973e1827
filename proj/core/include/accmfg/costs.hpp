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

#ifndef ACCMFG_COSTS_HPP
#define ACCMFG_COSTS_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "accmfg/fields.hpp"
#include "accmfg/measures.hpp"

namespace accmfg {

/// Running cost F(x, v) >= 0, periodic in x and coercive in v:
///   c_F^{-1} |v|^alpha - c_F  <=  F(x, v)  <=  c_F (1 + |v|^alpha),
/// with alpha in (1, 2] and finite-difference derivative growth
///   |D_x F| + |D_v F| <= C_F (1 + |v|^alpha).
/// Evaluation must be pure and safe for concurrent calls.
struct CostField {
  std::string name;
  std::function<double(const Vec&, const Vec&)> eval;
  double alpha = 2.0;
  double c_F = 1.0;
  double C_F = 0.0;

  double operator()(const Vec& x, const Vec& v) const { return eval(x, v); }

  /// Tabulates F on the grid nodes.
  ValueField on_grid(const PhaseGrid& grid) const;
  /// Per-pair running cost L(x, v, w) = 0.5 |w|^2 + F(x, v).
  std::vector<double> pair_cost(const PhaseGrid& grid) const;
};

/// F_R = min(F, R): bounded by R, nondecreasing in R pointwise.
CostField truncate(const CostField& F, double R);

/// F + c with the growth constant adjusted accordingly.
CostField shift(const CostField& F, double c);

struct GrowthReport {
  bool pass = true;
  double worst_margin = 0.0;  // most negative slack over the sample
  Vec witness_x{0, 0}, witness_v{0, 0};
  std::string violated;  // which inequality produced the worst margin
};

/// Samples the growth inequalities and F >= 0 on a deterministic
/// low-discrepancy point set with |v| up to v_radius. Failures are
/// reported, never thrown: a pass is evidence, not proof.
GrowthReport check_growth(const CostField& F, int sample_count, int d,
                          double v_radius);

/// Same style of sampled check for the derivative growth bound (F3),
/// using central finite differences.
GrowthReport check_derivative_growth(const CostField& F, int sample_count,
                                     int d, double v_radius);

/// Even trigonometric convolution kernel, one cosine mode per entry:
///   K(x) = sum_m  a_m cos(2 pi k_m x_{axis_m}).
/// All a_m > 0 makes the induced coupling monotone; a k = 0 entry adds a
/// constant background that keeps K pointwise nonnegative.
struct TrigKernel {
  struct Mode {
    int axis = 0;
    int k = 1;
    double a = 1.0;
  };
  std::vector<Mode> modes;

  double eval(const Vec& x, int d) const;
  double max_oscillating_coeff() const;  // max a over modes with k >= 1
  bool all_positive() const;
  double total_mass() const;  // sum a (bounds |K|)
};

/// Mean-field running cost F(x, v, m) = f0(x, v) + c (K * rho_m)(x), where
/// rho_m is the x-marginal of m. The convolution is evaluated exactly via
/// the Fourier moments of rho_m, once per measure update.
struct MeanFieldCoupling {
  CostField base;
  TrigKernel kernel;
  double strength = 0.0;  // c >= 0

  /// Freezes m: precomputes K * rho_m and returns a plain cost field.
  CostField freeze(const GridMeasure& m, const PhaseGrid& grid) const;

  /// Monotonicity constant 1 / (c max_k a_k); +inf when the coupling
  /// vanishes or has no oscillating mode.
  double monotonicity_constant() const;
};

struct MonotonicityReport {
  bool pass = true;
  double measured_M_F = 0.0;  // min over pairs of LHS / spectral-L2(ΔF)
  int pairs_tested = 0;
};

/// Draws seeded random measure pairs and evaluates both sides of the
/// strong monotonicity inequality. The L2 norm of ΔF is computed in its
/// spectral form sum_k a_k^2 |Δrho_k|^2 (cosine-series coefficients), so a
/// single-mode kernel measures exactly 1 / (c a_k).
MonotonicityReport check_monotonicity(const MeanFieldCoupling& F,
                                      int pair_count, const PhaseGrid& grid,
                                      unsigned seed = 12345);

/// Bounded terminal cost g(x, v, m), d_1-Lipschitz in m with constant lip_m.
struct TerminalCost {
  std::string name = "zero";
  // m/grid may be null for m-independent costs.
  std::function<double(const Vec&, const Vec&, const GridMeasure*,
                       const PhaseGrid*)>
      eval;
  double lip_m = 0.0;
  double bound = 0.0;

  static TerminalCost zero();
  bool is_zero() const { return !eval; }
  ValueField freeze(const GridMeasure& m, const PhaseGrid& grid) const;
};

/// ---- named example library ----------------------------------------------
/// quad        F = |v|^2
/// quad_shift  F = |v|^2 + c
/// well        F = |v|^2 + 1 + cos(2 pi x_1)
/// travel      F = |v - e_1|^2
/// Custom fields enter through register_cost_field.
using CostParams = std::map<std::string, double>;
using CostFieldFactory = std::function<CostField(const CostParams&, int d)>;

CostField make_cost_field(const std::string& name, const CostParams& params,
                          int d);
void register_cost_field(const std::string& name, CostFieldFactory factory);
std::vector<std::string> registered_cost_fields();

/// congestion = well + c (K * rho_m) with K = 1 + cos(2 pi x_1) by default.
/// params: "c" (strength), optional "a0", "a1" kernel coefficients.
MeanFieldCoupling make_coupling(const std::string& name,
                                const CostParams& params, int d);

TerminalCost make_terminal_cost(const std::string& name,
                                const CostParams& params, int d);

}  // namespace accmfg

#endif  // ACCMFG_COSTS_HPP
