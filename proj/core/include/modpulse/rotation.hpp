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

#include "modpulse/linalg.hpp"

namespace modpulse {

// Unit rotation axis. Construction normalizes; the raw components of an
// Axis always have Euclidean norm 1 to rounding.
class Axis {
 public:
  Axis() = default;
  explicit Axis(const Vec3& v);
  Axis(double x, double y, double z) : Axis(Vec3{x, y, z}) {}
  static Axis from_angles(double phi, double theta);

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double phi() const;    // (-pi, pi]
  double theta() const;  // [0, pi]

 private:
  Vec3 v_{0, 0, 1};
};

struct RotationState {
  double psi = 0;
  Axis axis;

  double phi() const { return axis.phi(); }
  double theta() const { return axis.theta(); }

  // Axis-angle form of an SU(2) element; psi lands in [0, 2 pi]. At psi = 0
  // the axis is arbitrary and `fallback` is used.
  static RotationState from_su2(const Su2& p, const Axis& fallback = Axis());
  Su2 to_su2() const;
};

// D_a(-psi): maps the lab-frame noise vector to its toggling-frame image.
Mat3 rotation_matrix(const Axis& axis, double psi);

// Same matrix assembled from the propagator P = w - i q.sigma, so that
// P^dagger (eta.sigma) P = (D eta).sigma.
Mat3 rotation_matrix(const Su2& p);

// n_eta = cos(psi) eta - sin(psi) (a x eta) + (1 - cos psi)(eta.a) a
Vec3 rotated_noise(const Axis& axis, double psi, const Vec3& eta);

}  // namespace modpulse
