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

#include "accmfg/curve.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace accmfg {

namespace {
// 3-point Gauss-Legendre on [0, 1]
constexpr double kGaussNode[3] = {0.1127016653792583, 0.5,
                                  0.8872983346207417};
constexpr double kGaussWeight[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
}  // namespace

Curve::Curve(int d, double t0, const Vec& x0, const Vec& v0)
    : d_(d), t0_(t0), x0_(x0), v0_(v0), xe_(x0), ve_(v0) {}

void Curve::append_constant(double dt, const Vec& w) {
  append_affine(dt, w, Vec{0.0, 0.0});
}

void Curve::append_affine(double dt, const Vec& a, const Vec& b) {
  if (!(dt > 0)) throw std::invalid_argument("Curve: segment dt must be > 0");
  Segment s;
  s.dt = dt;
  s.a = a;
  s.b = b;
  s.x0 = xe_;
  s.v0 = ve_;
  for (int i = 0; i < d_; ++i) {
    xe_[i] += ve_[i] * dt + 0.5 * a[i] * dt * dt + b[i] * dt * dt * dt / 6.0;
    ve_[i] += a[i] * dt + 0.5 * b[i] * dt * dt;
  }
  duration_ += dt;
  segs_.push_back(s);
}

void Curve::state_at(double t, Vec* x, Vec* v, Vec* w) const {
  double s = t - t0_;
  if (s < -1e-12 || s > duration_ + 1e-12)
    throw std::out_of_range("Curve::state_at: time outside the curve");
  s = std::min(std::max(s, 0.0), duration_);
  std::size_t k = 0;
  double acc = 0.0;
  while (k + 1 < segs_.size() && acc + segs_[k].dt < s) {
    acc += segs_[k].dt;
    ++k;
  }
  if (segs_.empty()) {
    *x = x0_;
    *v = v0_;
    *w = Vec{0.0, 0.0};
    return;
  }
  const Segment& seg = segs_[k];
  double u = s - acc;
  for (int i = 0; i < d_; ++i) {
    (*x)[i] = seg.x0[i] + seg.v0[i] * u + 0.5 * seg.a[i] * u * u +
              seg.b[i] * u * u * u / 6.0;
    (*v)[i] = seg.v0[i] + seg.a[i] * u + 0.5 * seg.b[i] * u * u;
    (*w)[i] = seg.a[i] + seg.b[i] * u;
  }
}

double Curve::acceleration_cost() const {
  double total = 0.0;
  for (const Segment& s : segs_) {
    double dt = s.dt;
    for (int i = 0; i < d_; ++i) {
      double a = s.a[i], b = s.b[i];
      total += 0.5 * (a * a * dt + a * b * dt * dt + b * b * dt * dt * dt / 3.0);
    }
  }
  return total;
}

Curve Curve::prefix(double t) const {
  double s = t - t0_;
  if (s < -1e-12 || s > duration_ + 1e-12)
    throw std::out_of_range("Curve::prefix: time outside the curve");
  s = std::min(std::max(s, 0.0), duration_);
  Curve out(d_, t0_, x0_, v0_);
  double acc = 0.0;
  for (const Segment& seg : segs_) {
    if (acc + seg.dt <= s + 1e-12) {
      out.append_affine(seg.dt, seg.a, seg.b);
      acc += seg.dt;
      if (std::abs(acc - s) <= 1e-12) break;
    } else {
      double u = s - acc;
      if (u > 1e-12) out.append_affine(u, seg.a, seg.b);
      break;
    }
  }
  return out;
}

Curve Curve::concat(const Curve& a, const Curve& b) {
  for (int i = 0; i < a.dim(); ++i) {
    if (std::abs(a.end_x()[i] - b.start_x()[i]) > 1e-9 ||
        std::abs(a.end_v()[i] - b.start_v()[i]) > 1e-9)
      throw std::invalid_argument("Curve::concat: endpoint mismatch");
  }
  Curve out = a;
  for (const Segment& seg : b.segments())
    out.append_affine(seg.dt, seg.a, seg.b);
  return out;
}

void Curve::export_csv(const std::string& path, double sample_dt) const {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw std::runtime_error("Curve::export_csv: cannot open " + path);
  std::fprintf(f, "t");
  for (int i = 0; i < d_; ++i) std::fprintf(f, ",x%d", i);
  for (int i = 0; i < d_; ++i) std::fprintf(f, ",v%d", i);
  for (int i = 0; i < d_; ++i) std::fprintf(f, ",w%d", i);
  std::fprintf(f, "\n");
  int n = std::max(1, static_cast<int>(std::ceil(duration_ / sample_dt)));
  for (int k = 0; k <= n; ++k) {
    double t = t0_ + duration_ * k / n;
    Vec x, v, w;
    state_at(t, &x, &v, &w);
    std::fprintf(f, "%.17g", t);
    for (int i = 0; i < d_; ++i) std::fprintf(f, ",%.17g", wrap01(x[i]));
    for (int i = 0; i < d_; ++i) std::fprintf(f, ",%.17g", v[i]);
    for (int i = 0; i < d_; ++i) std::fprintf(f, ",%.17g", w[i]);
    std::fprintf(f, "\n");
  }
  std::fclose(f);
}

namespace {

Curve connect_with_displacement(const Vec& x0, const Vec& v0, const Vec& dx,
                                const Vec& v1, double theta, int d) {
  Vec B{0, 0}, C{0, 0}, a{0, 0}, b{0, 0};
  for (int i = 0; i < d; ++i) {
    B[i] = (3.0 * dx[i] - theta * v1[i] - 2.0 * theta * v0[i]) /
           (theta * theta);
    C[i] = (-2.0 * dx[i] + theta * (v1[i] + v0[i])) / (theta * theta * theta);
    a[i] = 2.0 * B[i];
    b[i] = 6.0 * C[i];
  }
  Curve out(d, 0.0, x0, v0);
  out.append_affine(theta, a, b);
  return out;
}

double axis_accel_cost(double dx, double v0, double v1, double theta) {
  double B = (3.0 * dx - theta * v1 - 2.0 * theta * v0) / (theta * theta);
  double C = (-2.0 * dx + theta * (v1 + v0)) / (theta * theta * theta);
  return 2.0 * B * B * theta + 6.0 * B * C * theta * theta +
         6.0 * C * C * theta * theta * theta;
}

}  // namespace

Curve connect_cubic(const Vec& x0, const Vec& v0, const Vec& x1, const Vec& v1,
                    double theta, int d) {
  if (!(theta > 0))
    throw std::invalid_argument("connect_cubic: theta must be positive");
  Vec dx{0, 0};
  for (int i = 0; i < d; ++i) dx[i] = torus_shortest(x1[i] - x0[i]);
  return connect_with_displacement(x0, v0, dx, v1, theta, d);
}

Curve connect_cubic_lifted(const Vec& x0, const Vec& v0, const Vec& x1,
                           const Vec& v1, double theta, int d) {
  if (!(theta > 0))
    throw std::invalid_argument("connect_cubic_lifted: theta must be positive");
  Vec dx{0, 0};
  for (int i = 0; i < d; ++i) {
    double base = torus_shortest(x1[i] - x0[i]);
    // cost-minimizing real displacement is the cruise displacement
    double star = 0.5 * theta * (v0[i] + v1[i]);
    double k1 = std::floor(star - base), k2 = k1 + 1.0;
    double c1 = axis_accel_cost(base + k1, v0[i], v1[i], theta);
    double c2 = axis_accel_cost(base + k2, v0[i], v1[i], theta);
    double k;
    if (c1 < c2 - 1e-15)
      k = k1;
    else if (c2 < c1 - 1e-15)
      k = k2;
    else
      k = std::abs(k1) <= std::abs(k2) ? (std::abs(k1) == std::abs(k2)
                                              ? std::max(k1, k2)
                                              : k1)
                                       : k2;
    dx[i] = base + k;
  }
  return connect_with_displacement(x0, v0, dx, v1, theta, d);
}

double evaluate_cost(const Curve& curve, const CostField& F,
                     double quad_step) {
  double total = curve.acceleration_cost();
  const int d = curve.dim();
  for (const Curve::Segment& seg : curve.segments()) {
    int nsub = std::max(1, static_cast<int>(std::ceil(seg.dt / quad_step -
                                                      1e-12)));
    double sub = seg.dt / nsub;
    for (int k = 0; k < nsub; ++k) {
      for (int q = 0; q < 3; ++q) {
        double u = (k + kGaussNode[q]) * sub;
        Vec x, v;
        for (int i = 0; i < d; ++i) {
          x[i] = wrap01(seg.x0[i] + seg.v0[i] * u + 0.5 * seg.a[i] * u * u +
                        seg.b[i] * u * u * u / 6.0);
          v[i] = seg.v0[i] + seg.a[i] * u + 0.5 * seg.b[i] * u * u;
        }
        total += sub * kGaussWeight[q] * F.eval(x, v);
      }
    }
  }
  return total;
}

}  // namespace accmfg
