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

#include "accmfg/phase_grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace accmfg {

namespace {
int ipow(int b, int e) {
  int r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}
}  // namespace

PhaseGrid::PhaseGrid(const Spec& spec) : spec_(spec) {
  if (spec.d != 1 && spec.d != 2)
    throw std::invalid_argument("PhaseGrid: d must be 1 or 2");
  if (spec.n_x < 2) throw std::invalid_argument("PhaseGrid: n_x must be >= 2");
  if (spec.n_v < 3 || spec.n_v % 2 == 0)
    throw std::invalid_argument("PhaseGrid: n_v must be odd and >= 3");
  if (spec.n_w < 1 || spec.n_w % 2 == 0)
    throw std::invalid_argument("PhaseGrid: n_w must be odd and >= 1");
  if (!(spec.v_max > 0) || !(spec.w_max > 0) || !(spec.h > 0))
    throw std::invalid_argument("PhaseGrid: v_max, w_max, h must be positive");

  dx_ = 1.0 / spec.n_x;
  dv_ = 2.0 * spec.v_max / (spec.n_v - 1);
  dw_ = spec.n_w > 1 ? 2.0 * spec.w_max / (spec.n_w - 1) : 1.0;
  nx_flat_ = ipow(spec.n_x, spec.d);
  nv_flat_ = ipow(spec.n_v, spec.d);
  nw_flat_ = ipow(spec.n_w, spec.d);

  // Admissibility per axis: |v_j + h w_k| <= v_max (up to rounding).
  const double tol = 1e-9 * spec.v_max;
  std::vector<char> axis_ok(static_cast<std::size_t>(spec.n_v) * spec.n_w);
  for (int j = 0; j < spec.n_v; ++j)
    for (int k = 0; k < spec.n_w; ++k) {
      double vp = v_coord(j) + spec.h * w_coord(k);
      axis_ok[static_cast<std::size_t>(j) * spec.n_w + k] =
          std::abs(vp) <= spec.v_max + tol;
    }

  admissible_.resize(nv_flat_);
  admissible_mask_.assign(static_cast<std::size_t>(nv_flat_) * nw_flat_, 0);
  for (int vf = 0; vf < nv_flat_; ++vf) {
    int vi[kMaxDim] = {0, 0};
    if (spec.d == 1) {
      vi[0] = vf;
    } else {
      vi[0] = vf / spec.n_v;
      vi[1] = vf % spec.n_v;
    }
    for (int wf = 0; wf < nw_flat_; ++wf) {
      int wi[kMaxDim] = {0, 0};
      if (spec.d == 1) {
        wi[0] = wf;
      } else {
        wi[0] = wf / spec.n_w;
        wi[1] = wf % spec.n_w;
      }
      bool ok = true;
      for (int a = 0; a < spec.d; ++a)
        ok = ok && axis_ok[static_cast<std::size_t>(vi[a]) * spec.n_w + wi[a]];
      if (ok) {
        admissible_[vf].push_back(wf);
        admissible_mask_[static_cast<std::size_t>(vf) * nw_flat_ + wf] = 1;
      }
    }
    if (admissible_[vf].empty())
      throw std::logic_error("PhaseGrid: node without admissible control");
  }

  control_cost_.resize(nw_flat_);
  for (int wf = 0; wf < nw_flat_; ++wf) {
    Vec w = control_coords(wf);
    control_cost_[wf] = 0.5 * norm2sq(w, spec.d);
  }
}

int PhaseGrid::state_id(const int* xi, const int* vi) const {
  int xf = xi[0], vf = vi[0];
  if (spec_.d == 2) {
    xf = xi[0] * spec_.n_x + xi[1];
    vf = vi[0] * spec_.n_v + vi[1];
  }
  return xf * nv_flat_ + vf;
}

void PhaseGrid::state_indices(int sid, int* xi, int* vi) const {
  int xf = sid / nv_flat_;
  int vf = sid % nv_flat_;
  if (spec_.d == 1) {
    xi[0] = xf;
    vi[0] = vf;
  } else {
    xi[0] = xf / spec_.n_x;
    xi[1] = xf % spec_.n_x;
    vi[0] = vf / spec_.n_v;
    vi[1] = vf % spec_.n_v;
  }
}

void PhaseGrid::state_coords(int sid, Vec* x, Vec* v) const {
  int xi[kMaxDim], vi[kMaxDim];
  state_indices(sid, xi, vi);
  *x = Vec{0.0, 0.0};
  *v = Vec{0.0, 0.0};
  for (int a = 0; a < spec_.d; ++a) {
    (*x)[a] = x_coord(xi[a]);
    (*v)[a] = v_coord(vi[a]);
  }
}

Vec PhaseGrid::control_coords(int wflat) const {
  Vec w{0.0, 0.0};
  if (spec_.d == 1) {
    w[0] = w_coord(wflat);
  } else {
    w[0] = w_coord(wflat / spec_.n_w);
    w[1] = w_coord(wflat % spec_.n_w);
  }
  return w;
}

void PhaseGrid::control_indices(int wflat, int* wi) const {
  if (spec_.d == 1) {
    wi[0] = wflat;
  } else {
    wi[0] = wflat / spec_.n_w;
    wi[1] = wflat % spec_.n_w;
  }
}

int PhaseGrid::control_flat(const int* wi) const {
  return spec_.d == 1 ? wi[0] : wi[0] * spec_.n_w + wi[1];
}

bool PhaseGrid::v_in_box(const Vec& v, double tol) const {
  for (int a = 0; a < spec_.d; ++a)
    if (std::abs(v[a]) > spec_.v_max + tol) return false;
  return true;
}

int PhaseGrid::nearest_state(const Vec& x, const Vec& v) const {
  if (!v_in_box(v, 1e-9 * spec_.v_max + 1e-12))
    throw std::out_of_range("nearest_state: velocity outside the grid box");
  int xi[kMaxDim] = {0, 0}, vi[kMaxDim] = {0, 0};
  for (int a = 0; a < spec_.d; ++a) {
    int i = static_cast<int>(std::lround(wrap01(x[a]) / dx_));
    xi[a] = ((i % spec_.n_x) + spec_.n_x) % spec_.n_x;
    int j = static_cast<int>(std::lround((v[a] + spec_.v_max) / dv_));
    vi[a] = std::min(std::max(j, 0), spec_.n_v - 1);
  }
  return state_id(xi, vi);
}

int PhaseGrid::nearest_control(const Vec& w) const {
  int wi[kMaxDim] = {0, 0};
  for (int a = 0; a < spec_.d; ++a) {
    int k = static_cast<int>(std::lround((w[a] + spec_.w_max) / dw_));
    wi[a] = std::min(std::max(k, 0), spec_.n_w - 1);
  }
  return control_flat(wi);
}

TransitionKernel::TransitionKernel(const PhaseGrid& grid)
    : grid_(&grid),
      d_(grid.dim()),
      nx_(grid.spec().n_x),
      nv_(grid.spec().n_v),
      nw_(grid.spec().n_w) {
  const double h = grid.h();
  xsplit_.resize(nv_);
  for (int j = 0; j < nv_; ++j) {
    double shift = h * grid.v_coord(j) / grid.dx();
    double lo = std::floor(shift);
    AxisSplit s;
    s.lo = static_cast<int>(lo);
    s.w_hi = shift - lo;
    // snap near-integer shifts so that exact node-to-node motion stays exact
    if (s.w_hi < 1e-12) s.w_hi = 0.0;
    if (s.w_hi > 1.0 - 1e-12) {
      s.lo += 1;
      s.w_hi = 0.0;
    }
    xsplit_[j] = s;
  }
  vsplit_.resize(static_cast<std::size_t>(nv_) * nw_);
  for (int j = 0; j < nv_; ++j)
    for (int k = 0; k < nw_; ++k) {
      double q = (grid.v_coord(j) + h * grid.w_coord(k) + grid.v_max()) /
                 grid.dv();
      double lo = std::floor(q);
      AxisSplit s;
      s.lo = static_cast<int>(lo);
      s.w_hi = q - lo;
      if (s.w_hi < 1e-12) s.w_hi = 0.0;
      if (s.w_hi > 1.0 - 1e-12) {
        s.lo += 1;
        s.w_hi = 0.0;
      }
      // clamp exactly at the box faces (admissible controls only graze them)
      if (s.lo < 0) {
        s.lo = 0;
        s.w_hi = 0.0;
      }
      if (s.lo > nv_ - 2) {
        s.lo = nv_ - 2;
        s.w_hi = 1.0;
      }
      vsplit_[static_cast<std::size_t>(j) * nw_ + k] = s;
    }
}

int TransitionKernel::destinations(int sid, int wflat, int* ids,
                                   double* wts) const {
  const PhaseGrid& g = *grid_;
  int xi[kMaxDim], vi[kMaxDim], wi[kMaxDim];
  g.state_indices(sid, xi, vi);
  g.control_indices(wflat, wi);

  int xlo[kMaxDim];
  double xw[kMaxDim];
  int vlo[kMaxDim];
  double vw[kMaxDim];
  for (int a = 0; a < d_; ++a) {
    AxisSplit sx = xsplit_[vi[a]];
    xlo[a] = ((xi[a] + sx.lo) % nx_ + nx_) % nx_;
    xw[a] = sx.w_hi;
    AxisSplit sv = vsplit_[static_cast<std::size_t>(vi[a]) * nw_ + wi[a]];
    vlo[a] = sv.lo;
    vw[a] = sv.w_hi;
  }

  int n = 0;
  const int corners = 1 << (2 * d_);
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    int xj[kMaxDim], vj[kMaxDim];
    for (int a = 0; a < d_; ++a) {
      bool hx = (c >> a) & 1;
      bool hv = (c >> (d_ + a)) & 1;
      xj[a] = hx ? (xlo[a] + 1) % nx_ : xlo[a];
      vj[a] = hv ? vlo[a] + 1 : vlo[a];
      weight *= hx ? xw[a] : 1.0 - xw[a];
      weight *= hv ? vw[a] : 1.0 - vw[a];
    }
    if (weight == 0.0) continue;
    ids[n] = g.state_id(xj, vj);
    wts[n] = weight;
    ++n;
  }
  return n;
}

double TransitionKernel::expect(const std::vector<double>& field, int sid,
                                int wflat) const {
  int ids[16];
  double wts[16];
  int n = destinations(sid, wflat, ids, wts);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += wts[i] * field[ids[i]];
  return s;
}

void TransitionKernel::push_policy(const std::vector<double>& mass,
                                   const std::vector<int>& policy,
                                   std::vector<double>* out) const {
  out->assign(mass.size(), 0.0);
  int ids[16];
  double wts[16];
  for (std::size_t s = 0; s < mass.size(); ++s) {
    double m = mass[s];
    if (m == 0.0) continue;
    int n = destinations(static_cast<int>(s), policy[s], ids, wts);
    for (int i = 0; i < n; ++i) (*out)[ids[i]] += m * wts[i];
  }
}

void TransitionKernel::push_pairs(const std::vector<double>& pair_mass,
                                  std::vector<double>* out) const {
  const int nwf = grid_->num_w();
  out->assign(grid_->num_states(), 0.0);
  int ids[16];
  double wts[16];
  for (int s = 0; s < grid_->num_states(); ++s) {
    for (int w = 0; w < nwf; ++w) {
      double m = pair_mass[static_cast<std::size_t>(s) * nwf + w];
      if (m == 0.0) continue;
      int n = destinations(s, w, ids, wts);
      for (int i = 0; i < n; ++i) (*out)[ids[i]] += m * wts[i];
    }
  }
}

}  // namespace accmfg
