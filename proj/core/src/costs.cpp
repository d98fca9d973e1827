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

#include "accmfg/costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace accmfg {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Van der Corput radical inverse, the 2d/4d Halton sample used by the
// deterministic assumption checkers.
double radical_inverse(int base, int i) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= base;
    r += f * (i % base);
    i /= base;
  }
  return r;
}
}  // namespace

ValueField CostField::on_grid(const PhaseGrid& grid) const {
  ValueField out(grid);
  for (int s = 0; s < grid.num_states(); ++s) {
    Vec x, v;
    grid.state_coords(s, &x, &v);
    out.values[s] = eval(x, v);
  }
  return out;
}

std::vector<double> CostField::pair_cost(const PhaseGrid& grid) const {
  ValueField f = on_grid(grid);
  const int nw = grid.num_w();
  std::vector<double> out(static_cast<std::size_t>(grid.num_pairs()));
  for (int s = 0; s < grid.num_states(); ++s)
    for (int w = 0; w < nw; ++w)
      out[static_cast<std::size_t>(s) * nw + w] =
          grid.control_cost()[w] + f.values[s];
  return out;
}

CostField truncate(const CostField& F, double R) {
  if (!(R > 0)) throw std::invalid_argument("truncate: R must be positive");
  CostField out = F;
  out.name = F.name + "_trunc";
  auto base = F.eval;
  out.eval = [base, R](const Vec& x, const Vec& v) {
    return std::min(base(x, v), R);
  };
  return out;
}

CostField shift(const CostField& F, double c) {
  CostField out = F;
  out.name = F.name + "_shift";
  auto base = F.eval;
  out.eval = [base, c](const Vec& x, const Vec& v) { return base(x, v) + c; };
  out.c_F = F.c_F + std::abs(c);
  return out;
}

GrowthReport check_growth(const CostField& F, int sample_count, int d,
                          double v_radius) {
  GrowthReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= sample_count; ++i) {
    Vec x{radical_inverse(2, i), d > 1 ? radical_inverse(3, i) : 0.0};
    Vec v{(2.0 * radical_inverse(5, i) - 1.0) * v_radius,
          d > 1 ? (2.0 * radical_inverse(7, i) - 1.0) * v_radius : 0.0};
    double f = F.eval(x, v);
    double va = std::pow(norm2(v, d), F.alpha);
    struct {
      double margin;
      const char* what;
    } checks[] = {
        {f, "F >= 0"},
        {F.c_F * (1.0 + va) - f, "F <= c_F (1 + |v|^alpha)"},
        {f - (va / F.c_F - F.c_F), "F >= |v|^alpha / c_F - c_F"},
    };
    for (const auto& c : checks)
      if (c.margin < rep.worst_margin) {
        rep.worst_margin = c.margin;
        rep.witness_x = x;
        rep.witness_v = v;
        rep.violated = c.what;
      }
  }
  rep.pass = rep.worst_margin >= -1e-12;
  if (rep.pass) rep.violated.clear();
  return rep;
}

GrowthReport check_derivative_growth(const CostField& F, int sample_count,
                                     int d, double v_radius) {
  GrowthReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double eps = 1e-5;
  for (int i = 1; i <= sample_count; ++i) {
    Vec x{radical_inverse(2, i), d > 1 ? radical_inverse(3, i) : 0.0};
    Vec v{(2.0 * radical_inverse(5, i) - 1.0) * (v_radius - eps),
          d > 1 ? (2.0 * radical_inverse(7, i) - 1.0) * (v_radius - eps) : 0.0};
    double grad = 0.0;
    for (int a = 0; a < d; ++a) {
      Vec xp = x, xm = x;
      xp[a] += eps;
      xm[a] -= eps;
      grad += std::abs(F.eval(xp, v) - F.eval(xm, v)) / (2 * eps);
      Vec vp = v, vm = v;
      vp[a] += eps;
      vm[a] -= eps;
      grad += std::abs(F.eval(x, vp) - F.eval(x, vm)) / (2 * eps);
    }
    double va = std::pow(norm2(v, d), F.alpha);
    double margin = F.C_F * (1.0 + va) - grad;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      rep.witness_x = x;
      rep.witness_v = v;
      rep.violated = "|DxF| + |DvF| <= C_F (1 + |v|^alpha)";
    }
  }
  rep.pass = rep.worst_margin >= -1e-6;  // finite differences are inexact
  if (rep.pass) rep.violated.clear();
  return rep;
}

double TrigKernel::eval(const Vec& x, int d) const {
  double s = 0.0;
  for (const Mode& m : modes) {
    if (m.axis >= d) throw std::invalid_argument("TrigKernel: axis >= d");
    s += m.a * std::cos(kTwoPi * m.k * x[m.axis]);
  }
  return s;
}

double TrigKernel::max_oscillating_coeff() const {
  double r = 0.0;
  for (const Mode& m : modes)
    if (m.k >= 1) r = std::max(r, m.a);
  return r;
}

bool TrigKernel::all_positive() const {
  for (const Mode& m : modes)
    if (!(m.a > 0)) return false;
  return true;
}

double TrigKernel::total_mass() const {
  double s = 0.0;
  for (const Mode& m : modes) s += std::abs(m.a);
  return s;
}

namespace {
struct FourierMoments {
  std::vector<double> c, s;  // per kernel mode
};

FourierMoments x_marginal_moments(const TrigKernel& K, const GridMeasure& m,
                                  const PhaseGrid& grid) {
  FourierMoments mom;
  mom.c.assign(K.modes.size(), 0.0);
  mom.s.assign(K.modes.size(), 0.0);
  for (int sid = 0; sid < grid.num_states(); ++sid) {
    double w = m.weights[sid];
    if (w == 0.0) continue;
    Vec x, v;
    grid.state_coords(sid, &x, &v);
    for (std::size_t j = 0; j < K.modes.size(); ++j) {
      double phase = kTwoPi * K.modes[j].k * x[K.modes[j].axis];
      mom.c[j] += w * std::cos(phase);
      mom.s[j] += w * std::sin(phase);
    }
  }
  return mom;
}
}  // namespace

CostField MeanFieldCoupling::freeze(const GridMeasure& m,
                                    const PhaseGrid& grid) const {
  if (strength == 0.0) return base;
  FourierMoments mom = x_marginal_moments(kernel, m, grid);
  CostField out = base;
  out.name = base.name + "+coupling";
  auto f0 = base.eval;
  auto modes = kernel.modes;
  double c = strength;
  out.eval = [f0, modes, mom, c](const Vec& x, const Vec& v) {
    double conv = 0.0;
    for (std::size_t j = 0; j < modes.size(); ++j) {
      double phase = kTwoPi * modes[j].k * x[modes[j].axis];
      conv += modes[j].a *
              (mom.c[j] * std::cos(phase) + mom.s[j] * std::sin(phase));
    }
    return f0(x, v) + c * conv;
  };
  out.c_F = base.c_F + strength * kernel.total_mass();
  out.C_F = base.C_F + strength * kernel.total_mass() * kTwoPi *
                           8.0;  // coarse slope bound, enough for checks
  return out;
}

double MeanFieldCoupling::monotonicity_constant() const {
  double a = kernel.max_oscillating_coeff();
  if (strength <= 0.0 || a <= 0.0)
    return std::numeric_limits<double>::infinity();
  return 1.0 / (strength * a);
}

MonotonicityReport check_monotonicity(const MeanFieldCoupling& F,
                                      int pair_count, const PhaseGrid& grid,
                                      unsigned seed) {
  MonotonicityReport rep;
  rep.measured_M_F = std::numeric_limits<double>::infinity();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto random_measure = [&]() {
    GridMeasure m(grid);
    // a few random bumps keep the spectra nontrivial
    int bumps = 1 + static_cast<int>(unif(rng) * 4);
    for (int b = 0; b < bumps; ++b) {
      int sid = static_cast<int>(unif(rng) * grid.num_states());
      sid = std::min(sid, grid.num_states() - 1);
      m.weights[sid] += unif(rng) + 1e-3;
    }
    m.normalize();
    return m;
  };

  for (int p = 0; p < pair_count; ++p) {
    GridMeasure m1 = random_measure();
    GridMeasure m2 = random_measure();
    FourierMoments f1 = x_marginal_moments(F.kernel, m1, grid);
    FourierMoments f2 = x_marginal_moments(F.kernel, m2, grid);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t j = 0; j < F.kernel.modes.size(); ++j) {
      if (F.kernel.modes[j].k == 0) continue;  // constant mode cancels
      double dc = f1.c[j] - f2.c[j];
      double ds = f1.s[j] - f2.s[j];
      double p2 = dc * dc + ds * ds;
      double a = F.kernel.modes[j].a;
      lhs += F.strength * a * p2;
      rhs += F.strength * F.strength * a * a * p2;
    }
    ++rep.pairs_tested;
    if (rhs <= 1e-300) continue;  // ΔF identically zero for this pair
    rep.measured_M_F = std::min(rep.measured_M_F, lhs / rhs);
    if (lhs < -1e-12) rep.pass = false;
  }
  rep.pass = rep.pass && rep.measured_M_F > 0.0;
  return rep;
}

TerminalCost TerminalCost::zero() { return TerminalCost{}; }

ValueField TerminalCost::freeze(const GridMeasure& m,
                                const PhaseGrid& grid) const {
  ValueField out(grid, 0.0);
  if (is_zero()) return out;
  for (int s = 0; s < grid.num_states(); ++s) {
    Vec x, v;
    grid.state_coords(s, &x, &v);
    out.values[s] = eval(x, v, &m, &grid);
  }
  return out;
}

namespace {

double param(const CostParams& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::map<std::string, CostFieldFactory>& registry() {
  static std::map<std::string, CostFieldFactory> r = [] {
    std::map<std::string, CostFieldFactory> m;
    m["quad"] = [](const CostParams&, int d) {
      CostField f;
      f.name = "quad";
      f.alpha = 2.0;
      f.c_F = 1.0;
      f.C_F = 2.5;
      f.eval = [d](const Vec&, const Vec& v) { return norm2sq(v, d); };
      return f;
    };
    m["quad_shift"] = [](const CostParams& p, int d) {
      double c = param(p, "c", 1.0);
      CostField f;
      f.name = "quad_shift";
      f.alpha = 2.0;
      f.c_F = 1.0 + std::abs(c);
      f.C_F = 2.5;
      f.eval = [d, c](const Vec&, const Vec& v) { return norm2sq(v, d) + c; };
      return f;
    };
    m["well"] = [](const CostParams&, int d) {
      CostField f;
      f.name = "well";
      f.alpha = 2.0;
      f.c_F = 2.0;
      f.C_F = 2.0 * std::numbers::pi + 2.5;
      f.eval = [d](const Vec& x, const Vec& v) {
        return norm2sq(v, d) + 1.0 + std::cos(kTwoPi * x[0]);
      };
      return f;
    };
    m["travel"] = [](const CostParams&, int d) {
      CostField f;
      f.name = "travel";
      f.alpha = 2.0;
      f.c_F = 3.0;
      f.C_F = 4.5;
      f.eval = [d](const Vec&, const Vec& v) {
        Vec u = v;
        u[0] -= 1.0;
        return norm2sq(u, d);
      };
      return f;
    };
    return m;
  }();
  return r;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

CostField make_cost_field(const std::string& name, const CostParams& params,
                          int d) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  auto it = registry().find(name);
  if (it == registry().end())
    throw std::invalid_argument("unknown cost field: " + name);
  return it->second(params, d);
}

void register_cost_field(const std::string& name, CostFieldFactory factory) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  registry()[name] = std::move(factory);
}

std::vector<std::string> registered_cost_fields() {
  std::lock_guard<std::mutex> lock(registry_mutex());
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

MeanFieldCoupling make_coupling(const std::string& name,
                                const CostParams& params, int d) {
  MeanFieldCoupling cp;
  if (name == "congestion") {
    cp.base = make_cost_field("well", {}, d);
    cp.strength = param(params, "c", 1.0);
    cp.kernel.modes = {{0, 0, param(params, "a0", 1.0)},
                       {0, 1, param(params, "a1", 1.0)}};
    return cp;
  }
  if (name == "nonmonotone_toy") {
    // deliberately mixed-sign kernel: fails the monotonicity check
    cp.base = make_cost_field("well", {}, d);
    cp.strength = param(params, "c", 1.0);
    cp.kernel.modes = {{0, 0, 1.0}, {0, 1, param(params, "a1", -0.5)}};
    return cp;
  }
  // any registered static field acts as a coupling; "strength" (not the
  // field's own parameters) switches the convolution term on
  cp.base = make_cost_field(name, params, d);
  cp.strength = param(params, "strength", 0.0);
  if (cp.strength != 0.0)
    cp.kernel.modes = {{0, 0, param(params, "a0", 1.0)},
                       {0, 1, param(params, "a1", 1.0)}};
  return cp;
}

TerminalCost make_terminal_cost(const std::string& name,
                                const CostParams& params, int d) {
  TerminalCost g;
  g.name = name;
  if (name == "zero") return TerminalCost::zero();
  if (name == "velocity_bowl") {
    double cap = param(params, "cap", 1.0);
    g.bound = cap;
    g.lip_m = 0.0;
    g.eval = [d, cap](const Vec&, const Vec& v, const GridMeasure*,
                      const PhaseGrid*) {
      return std::min(norm2sq(v, d), cap);
    };
    return g;
  }
  if (name == "crowd_aversion") {
    double kappa = param(params, "kappa", 0.5);
    g.bound = 2.0 * kappa;
    g.lip_m = kappa * kTwoPi;
    g.eval = [kappa](const Vec& x, const Vec&, const GridMeasure* m,
                     const PhaseGrid* grid) {
      if (m == nullptr || grid == nullptr) return kappa;
      TrigKernel K;
      K.modes = {{0, 0, 1.0}, {0, 1, 1.0}};
      FourierMoments mom = x_marginal_moments(K, *m, *grid);
      double conv = mom.c[0];
      conv += mom.c[1] * std::cos(kTwoPi * x[0]) +
              mom.s[1] * std::sin(kTwoPi * x[0]);
      return kappa * 0.5 * conv;
    };
    return g;
  }
  throw std::invalid_argument("unknown terminal cost: " + name);
}

}  // namespace accmfg
