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

#include "accmfg/wasserstein.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "accmfg/network_simplex.hpp"

namespace accmfg {

namespace {
constexpr double kScale = 4503599627370496.0;  // 2^52, exact for dyadic mass
}

double ground_distance(const PhaseGrid& grid, int sid_a, int sid_b) {
  Vec xa, va, xb, vb;
  grid.state_coords(sid_a, &xa, &va);
  grid.state_coords(sid_b, &xb, &vb);
  double dv = 0.0;
  for (int i = 0; i < grid.dim(); ++i) {
    double t = va[i] - vb[i];
    dv += t * t;
  }
  return torus_dist(xa, xb, grid.dim()) + std::sqrt(dv);
}

double ground_diameter(const PhaseGrid& grid) {
  const double d = grid.dim();
  return 0.5 * std::sqrt(d) + 2.0 * grid.v_max() * std::sqrt(d);
}

double wasserstein1_upper_bound(const GridMeasure& a, const GridMeasure& b,
                                const PhaseGrid& grid) {
  if (a.weights.size() != b.weights.size())
    throw std::invalid_argument("wasserstein1: mismatched grids");
  double moving = 0.0;
  for (std::size_t i = 0; i < a.weights.size(); ++i)
    moving += std::max(a.weights[i] - b.weights[i], 0.0);
  return moving * ground_diameter(grid);
}

namespace {

struct SignedSupport {
  std::vector<int> nodes;            // state ids with nonzero net mass
  std::vector<std::int64_t> supply;  // scaled net mass per node
  std::int64_t moving = 0;           // total positive supply
};

SignedSupport cancel_and_scale(const GridMeasure& a, const GridMeasure& b) {
  SignedSupport out;
  std::int64_t pos = 0, neg = 0;
  int max_pos = -1, max_neg = -1;
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    double diff = a.weights[i] - b.weights[i];
    if (diff == 0.0) continue;
    std::int64_t q = static_cast<std::int64_t>(std::llround(diff * kScale));
    if (q == 0) continue;
    out.nodes.push_back(static_cast<int>(i));
    out.supply.push_back(q);
    if (q > 0) {
      pos += q;
      if (max_pos < 0 || q > out.supply[max_pos])
        max_pos = static_cast<int>(out.supply.size()) - 1;
    } else {
      neg -= q;
      if (max_neg < 0 || -q > -out.supply[max_neg])
        max_neg = static_cast<int>(out.supply.size()) - 1;
    }
  }
  // Rounding can leave a tiny imbalance; absorb it into the largest entry.
  std::int64_t imbalance = pos - neg;
  if (imbalance != 0) {
    if (imbalance > 0 && max_pos >= 0) {
      out.supply[max_pos] -= imbalance;
      pos -= imbalance;
    } else if (imbalance < 0 && max_neg >= 0) {
      out.supply[max_neg] -= imbalance;  // supply is negative, shrink deficit
      neg += imbalance;
    }
  }
  out.moving = pos;
  return out;
}

double solve_grid_graph_1d(const SignedSupport& s, const PhaseGrid& grid) {
  const int n_x = grid.spec().n_x, n_v = grid.spec().n_v;
  const int n = grid.num_states();
  NetworkSimplex ns(n);
  ns.reserve_arcs(static_cast<std::size_t>(4) * n);
  for (int i = 0; i < n_x; ++i)
    for (int j = 0; j < n_v; ++j) {
      int sid = i * n_v + j;
      int xnext = ((i + 1) % n_x) * n_v + j;
      ns.add_arc(sid, xnext, grid.dx());
      ns.add_arc(xnext, sid, grid.dx());
      if (j + 1 < n_v) {
        ns.add_arc(sid, sid + 1, grid.dv());
        ns.add_arc(sid + 1, sid, grid.dv());
      }
    }
  for (std::size_t k = 0; k < s.nodes.size(); ++k)
    ns.set_supply(s.nodes[k], s.supply[k]);
  return ns.solve() / kScale;
}

double solve_bipartite(const SignedSupport& s, const PhaseGrid& grid) {
  std::vector<int> sources, sinks;
  std::vector<std::int64_t> src_supply, sink_demand;
  for (std::size_t k = 0; k < s.nodes.size(); ++k) {
    if (s.supply[k] > 0) {
      sources.push_back(s.nodes[k]);
      src_supply.push_back(s.supply[k]);
    } else {
      sinks.push_back(s.nodes[k]);
      sink_demand.push_back(s.supply[k]);
    }
  }
  const std::size_t arcs = sources.size() * sinks.size();
  if (arcs > std::size_t(16000000))
    throw std::runtime_error("wasserstein1: bipartite support too large");
  NetworkSimplex ns(static_cast<int>(sources.size() + sinks.size()));
  ns.reserve_arcs(arcs);
  for (std::size_t i = 0; i < sources.size(); ++i)
    for (std::size_t j = 0; j < sinks.size(); ++j)
      ns.add_arc(static_cast<int>(i), static_cast<int>(sources.size() + j),
                 ground_distance(grid, sources[i], sinks[j]));
  for (std::size_t i = 0; i < sources.size(); ++i)
    ns.set_supply(static_cast<int>(i), src_supply[i]);
  for (std::size_t j = 0; j < sinks.size(); ++j)
    ns.set_supply(static_cast<int>(sources.size() + j), sink_demand[j]);
  return ns.solve() / kScale;
}

}  // namespace

double wasserstein1(const GridMeasure& a, const GridMeasure& b,
                    const PhaseGrid& grid) {
  if (a.weights.size() != b.weights.size() ||
      static_cast<int>(a.weights.size()) != grid.num_states())
    throw std::invalid_argument("wasserstein1: mismatched grids");
  SignedSupport s = cancel_and_scale(a, b);
  if (s.moving == 0) return 0.0;
  if (grid.dim() == 1) return solve_grid_graph_1d(s, grid);
  return solve_bipartite(s, grid);
}

}  // namespace accmfg
