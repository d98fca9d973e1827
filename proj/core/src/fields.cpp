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

#include "accmfg/fields.hpp"

#include <cmath>
#include <stdexcept>

namespace accmfg {

bool ValueField::all_finite() const {
  for (double v : values)
    if (!std::isfinite(v)) return false;
  return true;
}

double interpolate(const ValueField& field, const PhaseGrid& grid,
                   const Vec& x, const Vec& v) {
  const int d = grid.dim();
  if (!grid.v_in_box(v, 1e-9 * grid.v_max() + 1e-12))
    throw std::out_of_range("interpolate: velocity outside the grid box");

  int xlo[kMaxDim];
  double xw[kMaxDim];
  int vlo[kMaxDim];
  double vw[kMaxDim];
  const int nx = grid.spec().n_x, nv = grid.spec().n_v;
  for (int a = 0; a < d; ++a) {
    double p = wrap01(x[a]) / grid.dx();
    double fl = std::floor(p);
    xlo[a] = static_cast<int>(fl) % nx;
    xw[a] = p - fl;
    if (xw[a] > 1.0 - 1e-12) {  // snap to the next node
      xlo[a] = (xlo[a] + 1) % nx;
      xw[a] = 0.0;
    } else if (xw[a] < 1e-12) {
      xw[a] = 0.0;
    }
    double q = (v[a] + grid.v_max()) / grid.dv();
    double fq = std::floor(q);
    vlo[a] = static_cast<int>(fq);
    vw[a] = q - fq;
    if (vw[a] < 1e-12) vw[a] = 0.0;
    if (vw[a] > 1.0 - 1e-12) {
      vlo[a] += 1;
      vw[a] = 0.0;
    }
    if (vlo[a] < 0) {
      vlo[a] = 0;
      vw[a] = 0.0;
    }
    if (vlo[a] > nv - 2) {
      vlo[a] = nv - 2;
      vw[a] = vlo[a] + 1.0 <= q ? 1.0 : vw[a];
      if (vw[a] != 1.0 && vlo[a] + vw[a] > nv - 1) vw[a] = 1.0;
    }
  }

  double acc = 0.0;
  const int corners = 1 << (2 * d);
  for (int c = 0; c < corners; ++c) {
    double weight = 1.0;
    int xj[kMaxDim] = {0, 0}, vj[kMaxDim] = {0, 0};
    for (int a = 0; a < d; ++a) {
      bool hx = (c >> a) & 1;
      bool hv = (c >> (d + a)) & 1;
      xj[a] = hx ? (xlo[a] + 1) % nx : xlo[a];
      vj[a] = hv ? std::min(vlo[a] + 1, nv - 1) : vlo[a];
      weight *= hx ? xw[a] : 1.0 - xw[a];
      weight *= hv ? vw[a] : 1.0 - vw[a];
    }
    if (weight == 0.0) continue;
    acc += weight * field.values[grid.state_id(xj, vj)];
  }
  return acc;
}

ValueField tabulate(const PhaseGrid& grid,
                    const std::function<double(const Vec&, const Vec&)>& f) {
  ValueField out(grid);
  for (int s = 0; s < grid.num_states(); ++s) {
    Vec x, v;
    grid.state_coords(s, &x, &v);
    out.values[s] = f(x, v);
  }
  return out;
}

}  // namespace accmfg
