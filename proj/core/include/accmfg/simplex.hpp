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

#ifndef ACCMFG_SIMPLEX_HPP
#define ACCMFG_SIMPLEX_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace accmfg {

/// Column-wise sparse matrix for standard-form linear programs.
struct SparseColumns {
  int rows = 0;
  std::vector<std::int64_t> col_start{0};
  std::vector<int> row_idx;
  std::vector<double> value;

  int cols() const { return static_cast<int>(col_start.size()) - 1; }
  void add_column(const int* rows_ptr, const double* vals, int nnz);
};

enum class SimplexStatus { optimal, infeasible, unbounded, iteration_limit };

struct SimplexOptions {
  double rc_tol = 1e-9;     // dual feasibility tolerance (relative)
  double pivot_tol = 1e-9;  // minimum pivot magnitude
  int refactor_every = 1000;
  std::int64_t max_iterations = 0;  // 0 = automatic
  std::vector<int> warm_basis;      // basic column ids from a prior solve
};

struct SimplexResult {
  SimplexStatus status = SimplexStatus::iteration_limit;
  std::vector<double> x;  // primal values per structural column
  std::vector<double> y;  // row duals
  double objective = 0.0;
  std::int64_t iterations = 0;
  std::vector<int> basis;  // reusable as warm_basis
};

/// Revised primal simplex for  min c'x  s.t.  Ax = b, x >= 0  with b >= 0.
/// Dense explicit basis inverse with product-form updates and periodic
/// refactorization; Dantzig pricing with a Bland fallback on stalls.
/// Artificial columns may remain basic at level zero (they cover redundant
/// rows) and are never allowed to grow. Deterministic: no randomized rules.
SimplexResult simplex_solve(const SparseColumns& A,
                            const std::vector<double>& c,
                            const std::vector<double>& b,
                            const SimplexOptions& options = {});

/// Writes the LP in fixed MPS format (equality rows, default x >= 0 bounds)
/// for external verification.
void write_mps(const SparseColumns& A, const std::vector<double>& c,
               const std::vector<double>& b, const std::string& path);

}  // namespace accmfg

#endif  // ACCMFG_SIMPLEX_HPP
