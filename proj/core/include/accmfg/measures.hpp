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

#ifndef ACCMFG_MEASURES_HPP
#define ACCMFG_MEASURES_HPP

#include <vector>

#include "accmfg/phase_grid.hpp"

namespace accmfg {

inline constexpr double kMassTol = 1e-12;

/// Nonnegative mass per (x, v) node, total mass 1 within 1e-12.
struct GridMeasure {
  std::vector<double> weights;

  GridMeasure() = default;
  explicit GridMeasure(const PhaseGrid& grid, double fill = 0.0)
      : weights(grid.num_states(), fill) {}

  static GridMeasure dirac(const PhaseGrid& grid, const Vec& x, const Vec& v);
  static GridMeasure uniform(const PhaseGrid& grid);
  /// Uniform over x nodes, all mass at v = 0.
  static GridMeasure uniform_x_rest(const PhaseGrid& grid);

  double total_mass() const;
  bool is_normalized(double tol = kMassTol) const;
  void normalize();

  /// sum_i weights_i |v_i|^2 (always finite, the grid is bounded).
  double second_moment(const PhaseGrid& grid) const;
  /// Mass carried by nodes with some |v_a| >= 0.9 v_max; a truncation-quality
  /// warning indicator for the velocity box.
  double boundary_mass_fraction(const PhaseGrid& grid) const;
};

/// Nonnegative mass per (x, v, w) node, total mass 1 within 1e-12.
/// Structurally zero on inadmissible (v, w) pairs.
struct ControlMeasure {
  std::vector<double> weights;  // indexed by pair id = sid * n_w^d + wflat

  ControlMeasure() = default;
  explicit ControlMeasure(const PhaseGrid& grid)
      : weights(static_cast<std::size_t>(grid.num_pairs()), 0.0) {}

  static ControlMeasure dirac(const PhaseGrid& grid, const Vec& x, const Vec& v,
                              const Vec& w);

  double total_mass() const;
  bool is_normalized(double tol = kMassTol) const;

  /// (x, v)-marginal (the projection pi onto the first two variables).
  GridMeasure xv_marginal(const PhaseGrid& grid) const;
  /// Integral of a per-pair cost vector.
  double integrate_pairs(const std::vector<double>& pair_cost) const;
};

/// Time-indexed sequence of control measures, one per step of length h,
/// plus the time-T slice of the (x, v)-marginal. The discrete analog of a
/// T-closed measure flow.
struct FlowMeasure {
  std::vector<ControlMeasure> steps;
  GridMeasure terminal;  // (x, v)-marginal at time T
  double h = 0.0;

  int num_steps() const { return static_cast<int>(steps.size()); }
  double horizon() const { return h * num_steps(); }
  GridMeasure initial_marginal(const PhaseGrid& grid) const;
};

/// max_s |inflow(s) - outflow(s)| of the one-step chain: zero exactly for
/// stationary measures (the discrete closedness of a measure on (x, v, w)).
double closedness_residual(const ControlMeasure& mu,
                           const TransitionKernel& kernel);

/// Feasibility residual of a flow: initial-marginal mismatch and the worst
/// one-step transport defect between consecutive slices.
double flow_residual(const FlowMeasure& flow, const GridMeasure& m0,
                     const TransitionKernel& kernel);

}  // namespace accmfg

#endif  // ACCMFG_MEASURES_HPP
