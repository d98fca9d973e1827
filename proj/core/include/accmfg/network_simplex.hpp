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

#ifndef ACCMFG_NETWORK_SIMPLEX_HPP
#define ACCMFG_NETWORK_SIMPLEX_HPP

#include <cstdint>
#include <vector>

namespace accmfg {

/// Primal network simplex for uncapacitated min-cost flow with integer
/// supplies and real arc costs. Small and deterministic; sized for the
/// exact optimal-transport instances used by the d_1 distance (a few
/// thousand nodes, up to a few million arcs).
class NetworkSimplex {
 public:
  explicit NetworkSimplex(int num_nodes);

  /// Adds a directed arc; returns its index. Costs must be finite.
  int add_arc(int tail, int head, double cost);
  void set_supply(int node, std::int64_t supply);
  void reserve_arcs(std::size_t n);

  /// Runs the simplex. Supplies must sum to zero. Returns the optimal cost.
  /// Throws std::runtime_error if the instance is infeasible.
  double solve();

  std::int64_t flow(int arc) const { return flow_[arc]; }
  double potential(int node) const { return pot_[node]; }

 private:
  void init_tree();
  int price();               // entering arc or -1
  void pivot(int in_arc);
  void rebuild_tree();       // parents/depths/potentials from tree arcs

  int n_;
  std::vector<int> tail_, head_;
  std::vector<double> cost_;
  std::vector<std::int64_t> supply_;
  std::vector<std::int64_t> flow_;
  std::vector<char> in_tree_;
  std::vector<int> parent_, pred_arc_, depth_;
  std::vector<double> pot_;
  int root_ = 0;
  int next_arc_ = 0;
  int block_size_ = 0;
  // reusable rebuild buffers (adjacency in CSR form)
  std::vector<int> adj_head_, adj_next_, adj_arc_, bfs_stack_;
  std::vector<char> seen_;
};

}  // namespace accmfg

#endif  // ACCMFG_NETWORK_SIMPLEX_HPP
