// Copyright 2026 The modpulse Authors
//
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

#pragma once

#include <array>
#include <cmath>

namespace modpulse {

// Small fixed-size types used throughout. Kept as plain aggregates so the
// hot loops stay free of expression templates.
using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
  return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) {
  return {s * a[0], s * a[1], s * a[2]};
}
inline Vec3& operator+=(Vec3& a, const Vec3& b) {
  a[0] += b[0];
  a[1] += b[1];
  a[2] += b[2];
  return a;
}
inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline Vec3 operator*(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
          m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
          m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

inline Mat3 identity3() {
  return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
}

inline Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 t{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

inline double determinant(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

inline Vec3 column(const Mat3& m, int j) { return {m[0][j], m[1][j], m[2][j]}; }

// Element of SU(2) written as w*1 - i (x sx + y sy + z sz). Products follow
// quaternion multiplication; linear combinations (ensemble averages) stay in
// the real span, so the same type doubles as an averaged propagator.
struct Su2 {
  double w = 1, x = 0, y = 0, z = 0;

  Vec3 vec() const { return {x, y, z}; }
  double norm2() const { return w * w + x * x + y * y + z * z; }
  Su2 adjoint() const { return {w, -x, -y, -z}; }
  Su2& operator+=(const Su2& o) {
    w += o.w;
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  void normalize() {
    const double n = std::sqrt(norm2());
    w /= n;
    x /= n;
    y /= n;
    z /= n;
  }
};

inline Su2 operator*(const Su2& a, const Su2& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + b.w * a.x + a.y * b.z - a.z * b.y,
          a.w * b.y + b.w * a.y + a.z * b.x - a.x * b.z,
          a.w * b.z + b.w * a.z + a.x * b.y - a.y * b.x};
}

inline Su2 operator*(double s, const Su2& a) {
  return {s * a.w, s * a.x, s * a.y, s * a.z};
}

// exp(-i h.sigma) for a real 3-vector h.
inline Su2 su2_exp(const Vec3& h) {
  const double n = norm(h);
  if (n < 1e-8) {
    // Series through fourth order keeps the result exact in double.
    const double n2 = n * n;
    const double c = 1 - n2 / 2 + n2 * n2 / 24;
    const double s = 1 - n2 / 6 + n2 * n2 / 120;
    return {c, s * h[0], s * h[1], s * h[2]};
  }
  const double s = std::sin(n) / n;
  return {std::cos(n), s * h[0], s * h[1], s * h[2]};
}

}  // namespace modpulse
