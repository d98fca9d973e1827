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

#ifndef ACCMFG_WASSERSTEIN_HPP
#define ACCMFG_WASSERSTEIN_HPP

#include "accmfg/measures.hpp"

namespace accmfg {

/// Ground distance for the d_1 metric: flat-torus metric in x plus the
/// Euclidean metric in v.
double ground_distance(const PhaseGrid& grid, int sid_a, int sid_b);

/// Largest possible ground distance between two grid nodes.
double ground_diameter(const PhaseGrid& grid);

/// Exact Kantorovich-Rubinstein distance between two normalized grid
/// measures, computed by an exact transport LP (network simplex) after
/// cancelling common mass. In d = 1 the transport runs on the sparse grid
/// graph, whose shortest-path metric coincides with the ground distance;
/// in d = 2 it runs on the complete bipartite support graph.
double wasserstein1(const GridMeasure& a, const GridMeasure& b,
                    const PhaseGrid& grid);

/// Cheap upper bound: (mass that has to move) * (ground diameter).
double wasserstein1_upper_bound(const GridMeasure& a, const GridMeasure& b,
                                const PhaseGrid& grid);

}  // namespace accmfg

#endif  // ACCMFG_WASSERSTEIN_HPP
