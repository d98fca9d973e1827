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

#ifndef ACCMFG_CURVE_HPP
#define ACCMFG_CURVE_HPP

#include <string>
#include <vector>

#include "accmfg/costs.hpp"
#include "accmfg/geometry.hpp"

namespace accmfg {

/// Curve with piecewise-affine acceleration: w(s) = a + b s on each segment.
/// Positions and velocities are exact piecewise-polynomial reconstructions
/// (double integration), so the acceleration cost integral is closed-form
/// and only running-cost terms need quadrature. Positions are tracked
/// unwrapped in R^d; wrap to the torus happens at evaluation sites.
class Curve {
 public:
  struct Segment {
    double dt;
    Vec a;  // acceleration at segment start
    Vec b;  // acceleration slope
    Vec x0, v0;  // cached segment start state (unwrapped)
  };

  Curve(int d, double t0, const Vec& x0, const Vec& v0);

  int dim() const { return d_; }
  double t0() const { return t0_; }
  double t1() const { return t0_ + duration_; }
  double duration() const { return duration_; }
  bool empty() const { return segs_.empty(); }
  const std::vector<Segment>& segments() const { return segs_; }

  /// Constant-acceleration step (the control lattice case).
  void append_constant(double dt, const Vec& w);
  /// Affine-acceleration step (cubic position segment).
  void append_affine(double dt, const Vec& a, const Vec& b);

  Vec start_x() const { return x0_; }
  Vec start_v() const { return v0_; }
  Vec end_x() const { return xe_; }
  Vec end_v() const { return ve_; }

  /// Exact state at absolute time t in [t0, t1].
  void state_at(double t, Vec* x, Vec* v, Vec* w) const;

  /// Integral of |w|^2 / 2 over the curve, exact.
  double acceleration_cost() const;

  /// Prefix of the curve up to absolute time t (t must be in [t0, t1];
  /// splits the containing segment exactly).
  Curve prefix(double t) const;

  /// Concatenation (b must start where a ends, within 1e-9).
  static Curve concat(const Curve& a, const Curve& b);

  /// CSV export with columns t, x.., v.., w.. sampled every sample_dt.
  void export_csv(const std::string& path, double sample_dt) const;

 private:
  int d_;
  double t0_;
  Vec x0_, v0_;
  Vec xe_, ve_;
  double duration_ = 0.0;
  std::vector<Segment> segs_;
};

/// The explicit cubic connector: sigma(t) = x0 + v0 t + B t^2 + C t^3 with
///   B = (3 dx - theta v1 - 2 theta v0) / theta^2,
///   C = (-2 dx + theta (v1 + v0)) / theta^3,
/// where dx is the shortest torus representative of x1 - x0 (ties toward the
/// nonnegative side). Endpoint identities sigma(theta) = x1 (mod 1) and
/// sigma'(theta) = v1 hold exactly by the algebra.
Curve connect_cubic(const Vec& x0, const Vec& v0, const Vec& x1, const Vec& v1,
                    double theta, int d);

/// Same connector, but the integer lift of the displacement is chosen per
/// axis to minimize the acceleration cost (the minimizing real displacement
/// is theta (v0 + v1) / 2). Used by the trajectory surgery, where a moving
/// state should keep cruising rather than brake to hit the nearest
/// representative.
Curve connect_cubic_lifted(const Vec& x0, const Vec& v0, const Vec& x1,
                           const Vec& v1, double theta, int d);

/// J(curve) = integral of |w|^2/2 + F(x, v): acceleration term closed-form,
/// F term by 3-point Gauss quadrature on substeps of length <= quad_step.
/// Exactly additive over concatenation.
double evaluate_cost(const Curve& curve, const CostField& F,
                     double quad_step = 0.125);

}  // namespace accmfg

#endif  // ACCMFG_CURVE_HPP
