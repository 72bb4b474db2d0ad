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

#include "modpulse/linalg.hpp"
#include "modpulse/noise_model.hpp"
#include "modpulse/trajectory.hpp"

namespace modpulse {

// Integrals of the columns c_b(t) = D(t) e_b of the toggling-frame matrix.
struct ColumnIntegrals {
  std::array<Vec3, 3> first{};                  // int c_b
  std::array<std::array<Vec3, 3>, 3> second{};  // int_{t2<t1} c_b(t1) x c_g(t2)
  double first_error = 0;
  double second_error = 0;
  bool has_second = false;
};

ColumnIntegrals column_integrals(const RotationTrajectory& tr, bool second_order);

// Third-order building block: (2/3) int_{t3<t2<t1} [2 c_b(t2)(c_a(t1).c_c(t3))
// - c_c(t3)(c_a(t1).c_b(t2)) - c_a(t1)(c_c(t3).c_b(t2))], indexed [a][b][c].
using ThirdOrderTensor = std::array<std::array<std::array<Vec3, 3>, 3>, 3>;
ThirdOrderTensor third_order_integrals(const RotationTrajectory& tr);

// int_{t2<t1} (t1 - t2) c_z(t1) x c_z(t2), the cusp correction weight.
Vec3 cusp_integral(const RotationTrajectory& tr);

// Pauli coefficients of tau_p H_n averaged over the noise. Orders 1 and 2 use
// the mean and second moments; order 3 uses Gaussian third moments plus the
// g1 cusp correction of the second-order term.
Vec3 magnus_term(int order, const RotationTrajectory& tr, const NoiseMoments& noise);
Vec3 magnus_term(int order, const RotationTrajectory& tr, const NoiseModel& noise);

}  // namespace modpulse
