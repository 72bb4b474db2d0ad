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

// Classical noise coupling eta(t).sigma with cylindrical symmetry: mean along
// z only, equal transverse variances, no zero-lag cross-correlations.
struct NoiseModel {
  double eta_bar_z = 1;
  double s_z2 = 0;
  double s_x2 = 0;        // = s_y^2
  double tau_c = 0;       // OU correlation time; 0 means static noise
  double g1 = 0;          // |dt| slope of the autocorrelation, diagnostics only

  static NoiseModel pure_dephasing(double eta_bar = 1, double s2 = 0);
  static NoiseModel general(double eta_bar_z = 1, double s_z2 = 1, double s_x2 = 1);

  bool pure_dephasing_only() const { return s_x2 == 0; }
  void validate() const;
};

// Zero-lag moments of an arbitrary noise vector: E[eta] and E[eta eta^T].
struct NoiseMoments {
  Vec3 mean{0, 0, 0};
  Mat3 second{};
  double g1 = 0;  // cusp slope of the zz autocorrelation

  static NoiseMoments from(const NoiseModel& m);
  static NoiseMoments deterministic(const Vec3& eta);

  // Gaussian factorization of E[eta_a eta_b eta_c].
  double third(int a, int b, int c) const;
};

}  // namespace modpulse
