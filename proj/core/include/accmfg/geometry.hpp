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

#ifndef ACCMFG_GEOMETRY_HPP
#define ACCMFG_GEOMETRY_HPP

#include <array>
#include <cmath>
#include <cstddef>

namespace accmfg {

// Maximum supported spatial dimension. Phase space is T^d x R^d x R^d.
inline constexpr int kMaxDim = 2;

// Fixed-capacity vector for points on the torus, velocities and controls.
// Only the first d entries are meaningful; the rest stay zero.
using Vec = std::array<double, kMaxDim>;

inline Vec vec1(double a) { return Vec{a, 0.0}; }
inline Vec vec2(double a, double b) { return Vec{a, b}; }

inline double dot(const Vec& a, const Vec& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2sq(const Vec& a, int d) { return dot(a, a, d); }
inline double norm2(const Vec& a, int d) { return std::sqrt(norm2sq(a, d)); }

// Wraps a coordinate to the fundamental domain [0, 1).
inline double wrap01(double x) {
  double y = x - std::floor(x);
  if (y >= 1.0) y -= 1.0;  // guards x = -eps rounding to 1.0
  return y;
}

// Shortest representative of a displacement on the unit torus, in (-1/2, 1/2].
// Ties between -1/2 and 1/2 break toward the nonnegative side.
inline double torus_shortest(double dx) {
  double y = dx - std::round(dx);
  if (y <= -0.5) y += 1.0;
  return y;
}

// Torus distance per axis, in [0, 1/2].
inline double torus_dist1(double a, double b) {
  return std::abs(torus_shortest(a - b));
}

// Flat-torus metric between x-points (Euclidean norm of wrapped differences).
inline double torus_dist(const Vec& a, const Vec& b, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    double t = torus_shortest(a[i] - b[i]);
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace accmfg

#endif  // ACCMFG_GEOMETRY_HPP
