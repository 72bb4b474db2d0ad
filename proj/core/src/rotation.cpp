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

#include "modpulse/rotation.hpp"

#include <cmath>
#include <numbers>

#include "modpulse/error.hpp"

namespace modpulse {

Axis::Axis(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0) || !std::isfinite(n)) throw SpecError("axis must be a nonzero finite vector");
  v_ = {v[0] / n, v[1] / n, v[2] / n};
}

Axis Axis::from_angles(double phi, double theta) {
  return Axis(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
              std::cos(theta));
}

double Axis::phi() const {
  double p = std::atan2(v_[1], v_[0]);
  if (p <= -std::numbers::pi) p += 2 * std::numbers::pi;
  return p;
}

double Axis::theta() const {
  return std::atan2(std::hypot(v_[0], v_[1]), v_[2]);
}

RotationState RotationState::from_su2(const Su2& p, const Axis& fallback) {
  const double s = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
  RotationState r;
  r.psi = 2 * std::atan2(s, p.w);
  r.axis = s > 0 ? Axis(p.x, p.y, p.z) : fallback;
  return r;
}

Su2 RotationState::to_su2() const {
  const double c = std::cos(psi / 2), s = std::sin(psi / 2);
  return {c, s * axis[0], s * axis[1], s * axis[2]};
}

Mat3 rotation_matrix(const Axis& a, double psi) {
  const double c = std::cos(psi), s = std::sin(psi), k = 1 - c;
  const double x = a[0], y = a[1], z = a[2];
  return Mat3{{{c + k * x * x, z * s + k * x * y, -y * s + k * x * z},
               {-z * s + k * x * y, c + k * y * y, x * s + k * y * z},
               {y * s + k * x * z, -x * s + k * y * z, c + k * z * z}}};
}

Mat3 rotation_matrix(const Su2& p) {
  // (2w^2 - 1) I + 2 q q^T - 2 w [q]_x ; half-angle form of the matrix above.
  const double w = p.w, x = p.x, y = p.y, z = p.z;
  const double d = 2 * w * w - 1;
  return Mat3{{{d + 2 * x * x, 2 * x * y + 2 * w * z, 2 * x * z - 2 * w * y},
               {2 * x * y - 2 * w * z, d + 2 * y * y, 2 * y * z + 2 * w * x},
               {2 * x * z + 2 * w * y, 2 * y * z - 2 * w * x, d + 2 * z * z}}};
}

Vec3 rotated_noise(const Axis& axis, double psi, const Vec3& eta) {
  const Vec3& a = axis.vec();
  const double c = std::cos(psi);
  return c * eta - std::sin(psi) * cross(a, eta) + ((1 - c) * dot(eta, a)) * a;
}

}  // namespace modpulse
