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

#include "accmfg/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace accmfg {

void SparseColumns::add_column(const int* rows_ptr, const double* vals,
                               int nnz) {
  for (int i = 0; i < nnz; ++i) {
    row_idx.push_back(rows_ptr[i]);
    value.push_back(vals[i]);
  }
  col_start.push_back(static_cast<std::int64_t>(row_idx.size()));
}

namespace {

/// Dense basis inverse, stored column-major so that both FTRAN and the
/// dual vector run with unit stride.
class BasisInverse {
 public:
  explicit BasisInverse(int m) : m_(m), inv_(static_cast<std::size_t>(m) * m) {}

  double* col(int k) { return inv_.data() + static_cast<std::size_t>(k) * m_; }
  const double* col(int k) const {
    return inv_.data() + static_cast<std::size_t>(k) * m_;
  }

  /// inv <- B^{-1} by Gauss-Jordan with partial pivoting.
  /// B is given column-wise (dense scratch). Throws on singularity.
  void refactor(std::vector<double>& B) {
    // Work on the augmented system [B | I] reduced in place.
    const int m = m_;
    std::fill(inv_.begin(), inv_.end(), 0.0);
    for (int i = 0; i < m; ++i) col(i)[i] = 1.0;
    std::vector<int> perm(m);
    for (int i = 0; i < m; ++i) perm[i] = i;

    for (int k = 0; k < m; ++k) {
      // pivot search in column k, rows k..m-1
      int piv = k;
      double best = std::abs(B[static_cast<std::size_t>(k) * m + k]);
      for (int i = k + 1; i < m; ++i) {
        double a = std::abs(B[static_cast<std::size_t>(k) * m + i]);
        if (a > best) {
          best = a;
          piv = i;
        }
      }
      if (best < 1e-12) throw std::runtime_error("simplex: singular basis");
      if (piv != k) {
        for (int j = 0; j < m; ++j)
          std::swap(B[static_cast<std::size_t>(j) * m + k],
                    B[static_cast<std::size_t>(j) * m + piv]);
        for (int j = 0; j < m; ++j) std::swap(col(j)[k], col(j)[piv]);
      }
      double inv_piv = 1.0 / B[static_cast<std::size_t>(k) * m + k];
      // scale row k
      for (int j = 0; j < m; ++j) B[static_cast<std::size_t>(j) * m + k] *= inv_piv;
      for (int j = 0; j < m; ++j) col(j)[k] *= inv_piv;
      // eliminate other rows
      for (int i = 0; i < m; ++i) {
        if (i == k) continue;
        double f = B[static_cast<std::size_t>(k) * m + i];
        if (f == 0.0) continue;
        for (int j = k; j < m; ++j)
          B[static_cast<std::size_t>(j) * m + i] -=
              f * B[static_cast<std::size_t>(j) * m + k];
        for (int j = 0; j < m; ++j) col(j)[i] -= f * col(j)[k];
      }
    }
  }

  /// d = inv * a for sparse a.
  void ftran(const int* rows, const double* vals, int nnz,
             std::vector<double>* d) const {
    std::fill(d->begin(), d->end(), 0.0);
    for (int t = 0; t < nnz; ++t) {
      const double* ck = col(rows[t]);
      double v = vals[t];
      for (int i = 0; i < m_; ++i) (*d)[i] += v * ck[i];
    }
  }

  /// y = cB' * inv.
  void btran(const std::vector<double>& cB, std::vector<double>* y) const {
    for (int k = 0; k < m_; ++k) {
      const double* ck = col(k);
      double s = 0.0;
      for (int i = 0; i < m_; ++i) s += cB[i] * ck[i];
      (*y)[k] = s;
    }
  }

  /// Product-form update after a pivot on row r with FTRAN vector d.
  void update(int r, const std::vector<double>& d) {
    const double inv_piv = 1.0 / d[r];
    for (int k = 0; k < m_; ++k) {
      double* ck = col(k);
      double pr = ck[r] * inv_piv;
      if (pr == 0.0) {
        continue;
      }
      for (int i = 0; i < m_; ++i) ck[i] -= d[i] * pr;
      ck[r] = pr;
    }
  }

 private:
  int m_;
  std::vector<double> inv_;
};

}  // namespace

SimplexResult simplex_solve(const SparseColumns& A,
                            const std::vector<double>& c,
                            const std::vector<double>& b,
                            const SimplexOptions& options) {
  const int m = A.rows;
  const int n = A.cols();
  if (static_cast<int>(b.size()) != m || static_cast<int>(c.size()) != n)
    throw std::invalid_argument("simplex: dimension mismatch");
  for (double bi : b)
    if (bi < 0) throw std::invalid_argument("simplex: requires b >= 0");

  SimplexResult res;
  res.x.assign(n, 0.0);
  res.y.assign(m, 0.0);

  // basis[i] in [0, n) structural, or n + r for the artificial of row r.
  std::vector<int> basis(m);
  const bool warm = static_cast<int>(options.warm_basis.size()) == m;
  if (warm) {
    basis = options.warm_basis;
  } else {
    for (int i = 0; i < m; ++i) basis[i] = n + i;
  }
  auto is_artificial = [&](int j) { return j >= n; };

  BasisInverse binv(m);
  std::vector<double> Bcols(static_cast<std::size_t>(m) * m);
  std::vector<double> xB(m), cB(m), y(m), d(m);

  auto column_cost = [&](int j) { return is_artificial(j) ? 0.0 : c[j]; };

  auto load_B = [&]() {
    std::fill(Bcols.begin(), Bcols.end(), 0.0);
    for (int i = 0; i < m; ++i) {
      int j = basis[i];
      double* colp = Bcols.data() + static_cast<std::size_t>(i) * m;
      if (is_artificial(j)) {
        colp[j - n] = 1.0;
      } else {
        for (std::int64_t t = A.col_start[j]; t < A.col_start[j + 1]; ++t)
          colp[A.row_idx[t]] += A.value[t];
      }
    }
  };

  auto refactor = [&]() {
    load_B();
    binv.refactor(Bcols);
    // xB = binv * b  (b is dense but short)
    std::fill(xB.begin(), xB.end(), 0.0);
    for (int k = 0; k < m; ++k) {
      if (b[k] == 0.0) continue;
      const double* ck = binv.col(k);
      for (int i = 0; i < m; ++i) xB[i] += b[k] * ck[i];
    }
    for (int i = 0; i < m; ++i)
      if (xB[i] < 0 && xB[i] > -1e-9) xB[i] = 0.0;
    for (int i = 0; i < m; ++i) cB[i] = column_cost(basis[i]);
  };

  try {
    refactor();
  } catch (const std::runtime_error&) {
    if (!warm) throw;
    // stale warm basis: fall back to the artificial start
    for (int i = 0; i < m; ++i) basis[i] = n + i;
    refactor();
  }

  // With an artificial start the initial point is xB = b >= 0, feasible for
  // the extended problem; artificials are pinned to zero by the ratio test,
  // so the method is a single phase that never prices them in.
  bool artificial_start = !warm;
  if (artificial_start) {
    // Artificials carry flow b_i > 0 initially: that is infeasible for the
    // original problem unless b_i == 0. Price with cost 1 on artificials
    // until they are all at level zero (classic phase 1), then switch.
  }

  std::int64_t max_iters = options.max_iterations > 0
                               ? options.max_iterations
                               : 200LL * (m + n) + 20000;
  bool phase1 = false;
  for (int i = 0; i < m; ++i)
    if (is_artificial(basis[i]) && xB[i] > 1e-12) phase1 = true;

  auto phase_cost = [&](int j) -> double {
    if (phase1) return is_artificial(j) ? 1.0 : 0.0;
    return column_cost(j);
  };

  double last_obj = std::numeric_limits<double>::infinity();
  std::int64_t stall = 0;
  bool bland = false;
  int since_refactor = 0;

  for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
    for (int i = 0; i < m; ++i) cB[i] = phase_cost(basis[i]);
    binv.btran(cB, &y);

    // pricing over structural columns
    int enter = -1;
    double best_rc = 0.0;
    for (int j = 0; j < n; ++j) {
      double rc = phase_cost(j);
      for (std::int64_t t = A.col_start[j]; t < A.col_start[j + 1]; ++t)
        rc -= y[A.row_idx[t]] * A.value[t];
      double tol = options.rc_tol * (1.0 + std::abs(phase_cost(j)));
      if (rc < -tol) {
        if (bland) {
          enter = j;
          break;
        }
        if (rc < best_rc) {
          best_rc = rc;
          enter = j;
        }
      }
    }

    if (enter < 0) {
      // optimal for the current phase
      if (phase1) {
        double infeas = 0.0;
        for (int i = 0; i < m; ++i)
          if (is_artificial(basis[i])) infeas += xB[i];
        if (infeas > 1e-7) {
          res.status = SimplexStatus::infeasible;
          res.basis = basis;
          return res;
        }
        phase1 = false;
        bland = false;
        stall = 0;
        last_obj = std::numeric_limits<double>::infinity();
        continue;
      }
      res.status = SimplexStatus::optimal;
      break;
    }

    binv.ftran(A.row_idx.data() + A.col_start[enter],
               A.value.data() + A.col_start[enter],
               static_cast<int>(A.col_start[enter + 1] - A.col_start[enter]),
               &d);

    // Ratio test. Artificial basics block in both directions: they must
    // stay at zero, otherwise stationarity would silently be violated.
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    double leave_piv = 0.0;
    for (int i = 0; i < m; ++i) {
      double di = d[i];
      bool art = is_artificial(basis[i]);
      double step;
      if (di > options.pivot_tol)
        step = std::max(xB[i], 0.0) / di;
      else if (art && di < -options.pivot_tol)
        step = std::max(xB[i], 0.0) / -di;
      else
        continue;
      double mag = std::abs(di);
      if (step < theta * (1.0 - 1e-10) ||
          (step <= theta * (1.0 + 1e-10) &&
           (mag > std::abs(leave_piv) ||
            (mag == std::abs(leave_piv) && leave >= 0 &&
             basis[i] < basis[leave])))) {
        theta = step;
        leave = i;
        leave_piv = di;
      }
    }

    if (leave < 0) {
      res.status = SimplexStatus::unbounded;
      res.basis = basis;
      return res;
    }

    // update primal values
    for (int i = 0; i < m; ++i) xB[i] -= theta * d[i];
    xB[leave] = theta;
    basis[leave] = enter;
    for (int i = 0; i < m; ++i)
      if (xB[i] < 0 && xB[i] > -1e-9) xB[i] = 0.0;

    binv.update(leave, d);
    if (++since_refactor >= options.refactor_every) {
      refactor();
      since_refactor = 0;
    }

    // stall detection -> Bland's rule (finite termination)
    double obj = 0.0;
    for (int i = 0; i < m; ++i) obj += phase_cost(basis[i]) * xB[i];
    if (obj < last_obj - 1e-13 * (1.0 + std::abs(last_obj))) {
      last_obj = obj;
      stall = 0;
      bland = false;
    } else if (++stall > 500) {
      bland = true;
    }
  }

  if (res.status != SimplexStatus::optimal) {
    res.status = SimplexStatus::iteration_limit;
  }

  // final clean refactor for crisp primal/dual values
  refactor();
  for (int i = 0; i < m; ++i) cB[i] = column_cost(basis[i]);
  binv.btran(cB, &y);
  res.y = y;
  std::fill(res.x.begin(), res.x.end(), 0.0);
  double obj = 0.0;
  for (int i = 0; i < m; ++i) {
    int j = basis[i];
    double v = std::max(xB[i], 0.0);
    if (!is_artificial(j)) {
      res.x[j] += v;
      obj += c[j] * v;
    }
  }
  res.objective = obj;
  res.basis = basis;
  return res;
}

void write_mps(const SparseColumns& A, const std::vector<double>& c,
               const std::vector<double>& b, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("write_mps: cannot open " + path);
  std::fprintf(f, "NAME          ACCMFG_LP\nROWS\n N  COST\n");
  for (int i = 0; i < A.rows; ++i) std::fprintf(f, " E  R%d\n", i);
  std::fprintf(f, "COLUMNS\n");
  for (int j = 0; j < A.cols(); ++j) {
    if (c[j] != 0.0)
      std::fprintf(f, "    X%-9d COST      %.17g\n", j, c[j]);
    for (std::int64_t t = A.col_start[j]; t < A.col_start[j + 1]; ++t)
      std::fprintf(f, "    X%-9d R%-9d %.17g\n", j, A.row_idx[t], A.value[t]);
  }
  std::fprintf(f, "RHS\n");
  for (int i = 0; i < A.rows; ++i)
    if (b[i] != 0.0) std::fprintf(f, "    RHS       R%-9d %.17g\n", i, b[i]);
  std::fprintf(f, "BOUNDS\nENDATA\n");
  std::fclose(f);
}

}  // namespace accmfg
