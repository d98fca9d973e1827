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

#include "accmfg/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace accmfg {

namespace {
constexpr std::int64_t kInfFlow = std::numeric_limits<std::int64_t>::max() / 4;
constexpr double kRcTol = 1e-11;
}  // namespace

NetworkSimplex::NetworkSimplex(int num_nodes)
    : n_(num_nodes), supply_(num_nodes + 1, 0) {}

void NetworkSimplex::reserve_arcs(std::size_t n) {
  tail_.reserve(n);
  head_.reserve(n);
  cost_.reserve(n);
}

int NetworkSimplex::add_arc(int tail, int head, double cost) {
  tail_.push_back(tail);
  head_.push_back(head);
  cost_.push_back(cost);
  return static_cast<int>(tail_.size()) - 1;
}

void NetworkSimplex::set_supply(int node, std::int64_t supply) {
  supply_[node] = supply;
}

void NetworkSimplex::init_tree() {
  root_ = n_;
  double big = 1.0;
  for (double c : cost_) big += std::abs(c);

  // Artificial arcs node <-> root carry the initial flows.
  for (int i = 0; i < n_; ++i) {
    if (supply_[i] >= 0)
      add_arc(i, root_, big);
    else
      add_arc(root_, i, big);
  }
  flow_.assign(tail_.size(), 0);
  in_tree_.assign(tail_.size(), 0);
  const int first_art = static_cast<int>(tail_.size()) - n_;
  for (int i = 0; i < n_; ++i) {
    flow_[first_art + i] = std::llabs(supply_[i]);
    in_tree_[first_art + i] = 1;
  }
  parent_.assign(n_ + 1, root_);
  pred_arc_.assign(n_ + 1, -1);
  depth_.assign(n_ + 1, 1);
  pot_.assign(n_ + 1, 0.0);
  parent_[root_] = -1;
  depth_[root_] = 0;
  for (int i = 0; i < n_; ++i) {
    pred_arc_[i] = first_art + i;
    pot_[i] = supply_[i] >= 0 ? -cost_[first_art + i] : cost_[first_art + i];
  }
  next_arc_ = 0;
  block_size_ = std::max<int>(
      64, static_cast<int>(std::sqrt(static_cast<double>(tail_.size()))));
}

int NetworkSimplex::price() {
  const int m = static_cast<int>(tail_.size());
  int best = -1;
  double best_rc = -kRcTol;
  int count = block_size_;
  for (int scanned = 0; scanned < m; ++scanned) {
    int a = next_arc_;
    next_arc_ = next_arc_ + 1 == m ? 0 : next_arc_ + 1;
    if (in_tree_[a]) continue;
    double rc = cost_[a] + pot_[tail_[a]] - pot_[head_[a]];
    if (rc < best_rc) {
      best_rc = rc;
      best = a;
    }
    if (--count == 0) {
      if (best >= 0) return best;
      count = block_size_;
    }
  }
  return best;
}

void NetworkSimplex::rebuild_tree() {
  // Tree adjacency from pred arcs (linked lists over reusable buffers),
  // then a DFS from the root recomputing parents, depths and potentials.
  // O(n) per pivot, no allocations after warmup.
  adj_head_.assign(n_ + 1, -1);
  adj_next_.resize(2 * (n_ + 1));
  adj_arc_.resize(2 * (n_ + 1));
  int slot = 0;
  for (int i = 0; i <= n_; ++i) {
    int a = pred_arc_[i];
    if (a < 0) continue;
    for (int endpoint : {tail_[a], head_[a]}) {
      adj_arc_[slot] = a;
      adj_next_[slot] = adj_head_[endpoint];
      adj_head_[endpoint] = slot;
      ++slot;
    }
  }
  seen_.assign(n_ + 1, 0);
  bfs_stack_.clear();
  bfs_stack_.push_back(root_);
  seen_[root_] = 1;
  parent_[root_] = -1;
  depth_[root_] = 0;
  pot_[root_] = 0.0;
  while (!bfs_stack_.empty()) {
    int u = bfs_stack_.back();
    bfs_stack_.pop_back();
    for (int s = adj_head_[u]; s >= 0; s = adj_next_[s]) {
      int a = adj_arc_[s];
      int v = tail_[a] == u ? head_[a] : tail_[a];
      if (seen_[v]) continue;
      seen_[v] = 1;
      parent_[v] = u;
      pred_arc_[v] = a;
      depth_[v] = depth_[u] + 1;
      // reduced cost of tree arcs is zero
      pot_[v] = tail_[a] == v ? pot_[u] - cost_[a] : pot_[u] + cost_[a];
      bfs_stack_.push_back(v);
    }
  }
}

void NetworkSimplex::pivot(int in_arc) {
  int u = tail_[in_arc], v = head_[in_arc];

  // join = lowest common ancestor
  int a = u, b = v;
  while (a != b) {
    if (depth_[a] >= depth_[b])
      a = parent_[a];
    else
      b = parent_[b];
  }
  const int join = a;

  // Leaving-arc search along both tree paths. The asymmetric tie-breaks
  // (strict < on the tail side, <= on the head side) keep the tree strongly
  // feasible, which rules out cycling.
  std::int64_t delta = kInfFlow;
  int out_node = -1;
  bool out_on_tail_side = true;
  for (int x = u; x != join; x = parent_[x]) {
    int e = pred_arc_[x];
    bool up = tail_[e] == x;  // arc points x -> parent: cycle decreases it
    std::int64_t d = up ? flow_[e] : kInfFlow;
    if (d < delta) {
      delta = d;
      out_node = x;
      out_on_tail_side = true;
    }
  }
  for (int x = v; x != join; x = parent_[x]) {
    int e = pred_arc_[x];
    bool down = head_[e] == x;  // arc points parent -> x: cycle decreases it
    std::int64_t d = down ? flow_[e] : kInfFlow;
    if (d <= delta) {
      delta = d;
      out_node = x;
      out_on_tail_side = false;
    }
  }
  if (out_node < 0 || delta >= kInfFlow)
    throw std::runtime_error("NetworkSimplex: unbounded pivot");

  // Apply the flow change around the cycle.
  flow_[in_arc] += delta;
  for (int x = u; x != join; x = parent_[x]) {
    int e = pred_arc_[x];
    flow_[e] += tail_[e] == x ? -delta : delta;
  }
  for (int x = v; x != join; x = parent_[x]) {
    int e = pred_arc_[x];
    flow_[e] += head_[e] == x ? -delta : delta;
  }

  (void)out_on_tail_side;
  int out_arc = pred_arc_[out_node];
  in_tree_[out_arc] = 0;
  in_tree_[in_arc] = 1;
  // Swap the leaving arc for the entering one in the per-node edge list;
  // rebuild_tree reads only arc endpoints, so any slot may carry it.
  pred_arc_[out_node] = in_arc;
  rebuild_tree();
}

double NetworkSimplex::solve() {
  std::int64_t total = 0;
  for (int i = 0; i < n_; ++i) total += supply_[i];
  if (total != 0)
    throw std::runtime_error("NetworkSimplex: supplies must sum to zero");

  const std::size_t num_real_arcs = tail_.size();
  init_tree();

  const std::int64_t max_pivots =
      50 * static_cast<std::int64_t>(tail_.size()) + 1000;
  std::int64_t pivots = 0;
  while (true) {
    int e = price();
    if (e < 0) break;
    if (++pivots > max_pivots)
      throw std::runtime_error("NetworkSimplex: pivot limit exceeded");
    pivot(e);
  }

  // Positive flow on an artificial arc means the instance was disconnected.
  for (std::size_t i = num_real_arcs; i < tail_.size(); ++i)
    if (flow_[i] > 0) throw std::runtime_error("NetworkSimplex: infeasible");

  double total_cost = 0.0;
  for (std::size_t i = 0; i < num_real_arcs; ++i)
    if (flow_[i] > 0)
      total_cost += cost_[i] * static_cast<double>(flow_[i]);
  return total_cost;
}

}  // namespace accmfg
