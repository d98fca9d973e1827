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

#ifndef ACCMFG_FIELDS_HPP
#define ACCMFG_FIELDS_HPP

#include <functional>
#include <vector>

#include "accmfg/phase_grid.hpp"

namespace accmfg {

/// One real number per (x, v) node. Entries must stay finite.
struct ValueField {
  std::vector<double> values;

  ValueField() = default;
  explicit ValueField(const PhaseGrid& grid, double fill = 0.0)
      : values(grid.num_states(), fill) {}

  double& operator[](int sid) { return values[sid]; }
  double operator[](int sid) const { return values[sid]; }
  bool all_finite() const;
};

/// Multilinear interpolation of a node field: periodic in x, clamped at the
/// velocity-box faces, exact at nodes. Throws if v lies strictly outside the
/// box (that signals a scheme bug upstream, callers clamp controls).
double interpolate(const ValueField& field, const PhaseGrid& grid,
                   const Vec& x, const Vec& v);

/// Tabulates a function of (x, v) on all grid nodes.
ValueField tabulate(const PhaseGrid& grid,
                    const std::function<double(const Vec&, const Vec&)>& f);

}  // namespace accmfg

#endif  // ACCMFG_FIELDS_HPP
