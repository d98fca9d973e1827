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

#ifndef ACCMFG_PHASE_GRID_HPP
#define ACCMFG_PHASE_GRID_HPP

#include <cstdint>
#include <vector>

#include "accmfg/geometry.hpp"

namespace accmfg {

/// Discretization of T^d x [-v_max, v_max]^d together with a finite control
/// set W = {-w_max, ..., w_max}^d and the time step h of the discrete chain.
///
/// Node layout (row-major, documented for the JSON schema):
///   state id  = xflat * n_v^d + vflat
///   xflat     = x_0 * n_x + x_1   (d = 2), x_0 (d = 1)
///   vflat     = v_0 * n_v + v_1   (d = 2), v_0 (d = 1)
///   pair id   = state id * n_w^d + wflat
///
/// n_v and n_w are odd so that v = 0 and w = 0 are exact nodes. A control w
/// is admissible at velocity v iff every component of v + h*w stays inside
/// the velocity box; w = 0 is therefore admissible everywhere. Controls that
/// would leave the box are removed from the admissible set, which keeps the
/// one-step chain well defined without reflecting or clamping the dynamics.
class PhaseGrid {
 public:
  struct Spec {
    int d = 1;            // spatial dimension (1 or 2)
    int n_x = 16;         // nodes per torus dimension
    double v_max = 2.0;   // velocity truncation radius
    int n_v = 17;         // velocity nodes per dimension (odd)
    double w_max = 4.0;   // control truncation radius
    int n_w = 9;          // control nodes per dimension (odd)
    double h = 0.125;     // time step
  };

  explicit PhaseGrid(const Spec& spec);

  const Spec& spec() const { return spec_; }
  int dim() const { return spec_.d; }
  double h() const { return spec_.h; }
  double dx() const { return dx_; }
  double dv() const { return dv_; }
  double dw() const { return dw_; }
  double v_max() const { return spec_.v_max; }
  double w_max() const { return spec_.w_max; }

  int num_x() const { return nx_flat_; }          // n_x^d
  int num_v() const { return nv_flat_; }          // n_v^d
  int num_w() const { return nw_flat_; }          // n_w^d
  int num_states() const { return nx_flat_ * nv_flat_; }
  std::int64_t num_pairs() const {
    return static_cast<std::int64_t>(num_states()) * num_w();
  }

  // index <-> coordinate helpers
  double x_coord(int i) const { return i * dx_; }
  double v_coord(int j) const { return -spec_.v_max + j * dv_; }
  double w_coord(int k) const { return -spec_.w_max + k * dw_; }
  int v_zero_index() const { return (spec_.n_v - 1) / 2; }
  int w_zero_index() const { return (spec_.n_w - 1) / 2; }

  int state_id(const int* xi, const int* vi) const;
  void state_coords(int sid, Vec* x, Vec* v) const;
  void state_indices(int sid, int* xi, int* vi) const;
  Vec control_coords(int wflat) const;
  void control_indices(int wflat, int* wi) const;

  /// State id of the grid node nearest to (x, v); x wraps, v must be in the
  /// box up to a tolerance.
  int nearest_state(const Vec& x, const Vec& v) const;
  int control_flat(const int* wi) const;
  /// Flat control index of the node nearest to w (must be inside the box).
  int nearest_control(const Vec& w) const;

  bool v_in_box(const Vec& v, double tol = 1e-9) const;

  /// Admissible controls at (flat) velocity index. Never empty.
  const std::vector<int>& admissible_controls(int vflat) const {
    return admissible_[vflat];
  }
  bool is_admissible(int vflat, int wflat) const {
    return admissible_mask_[static_cast<std::size_t>(vflat) * nw_flat_ + wflat];
  }

  /// 0.5 * |w|^2 for every flat control index.
  const std::vector<double>& control_cost() const { return control_cost_; }

 private:
  Spec spec_;
  double dx_, dv_, dw_;
  int nx_flat_, nv_flat_, nw_flat_;
  std::vector<std::vector<int>> admissible_;  // per vflat
  std::vector<char> admissible_mask_;
  std::vector<double> control_cost_;
};

/// Interpolation stencils of the one-step chain
///   (x, v, w)  ->  (x + h v mod 1, v + h w),
/// shared by the HJB solvers, LP assembly and forward mass transport so that
/// the cross-route identities hold at machine precision. Per axis the
/// position shift depends only on the velocity index and the velocity shift
/// only on (velocity, control), so the stencils factorize.
class TransitionKernel {
 public:
  struct AxisSplit {
    int lo = 0;        // lower node index (x: add to x-index mod n_x)
    double w_hi = 0.0; // weight of the upper node; lower gets 1 - w_hi
  };

  explicit TransitionKernel(const PhaseGrid& grid);

  const PhaseGrid& grid() const { return *grid_; }

  /// Position split along one axis for velocity index j: destination index is
  /// (x_index + lo) mod n_x with weight (1 - w_hi), +1 with weight w_hi.
  AxisSplit x_split(int j) const { return xsplit_[j]; }
  /// Velocity split along one axis: absolute destination indices lo, lo+1.
  AxisSplit v_split(int j, int k) const { return vsplit_[j * nw_ + k]; }

  /// Enumerates the destination states and weights of one (state, control)
  /// transition. `ids`/`wts` must hold at least 16 entries (2^{2d}).
  /// Returns the number of corners. Weights sum to 1.
  int destinations(int sid, int wflat, int* ids, double* wts) const;

  /// Expected value of `field` after one step from (sid, wflat).
  double expect(const std::vector<double>& field, int sid, int wflat) const;

  /// Pushes mass through a fixed control choice per state:
  /// out[s'] += sum_s mass[s] * P[(s, policy[s]) -> s'].
  void push_policy(const std::vector<double>& mass,
                   const std::vector<int>& policy,
                   std::vector<double>* out) const;

  /// Pushes a pair measure mu(s, w) forward: out[s'] = sum P * mu.
  void push_pairs(const std::vector<double>& pair_mass,
                  std::vector<double>* out) const;

 private:
  const PhaseGrid* grid_;
  int d_, nx_, nv_, nw_;
  std::vector<AxisSplit> xsplit_;  // [n_v]
  std::vector<AxisSplit> vsplit_;  // [n_v * n_w]
};

}  // namespace accmfg

#endif  // ACCMFG_PHASE_GRID_HPP
