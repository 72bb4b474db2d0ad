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

#include "modpulse/noise_model.hpp"

#include <cmath>

#include "modpulse/error.hpp"

namespace modpulse {

NoiseModel NoiseModel::pure_dephasing(double eta_bar, double s2) {
  NoiseModel m;
  m.eta_bar_z = eta_bar;
  m.s_z2 = s2;
  return m;
}

NoiseModel NoiseModel::general(double eta_bar_z, double s_z2, double s_x2) {
  NoiseModel m;
  m.eta_bar_z = eta_bar_z;
  m.s_z2 = s_z2;
  m.s_x2 = s_x2;
  return m;
}

void NoiseModel::validate() const {
  if (!std::isfinite(eta_bar_z) || !std::isfinite(g1)) throw SpecError("noise moments must be finite");
  if (!(s_z2 >= 0) || !(s_x2 >= 0)) throw SpecError("noise variances must be non-negative");
  if (!(tau_c >= 0)) throw SpecError("correlation time must be non-negative");
}

NoiseMoments NoiseMoments::from(const NoiseModel& m) {
  m.validate();
  NoiseMoments n;
  n.mean = {0, 0, m.eta_bar_z};
  n.second[0][0] = n.second[1][1] = m.s_x2;
  n.second[2][2] = m.eta_bar_z * m.eta_bar_z + m.s_z2;
  n.g1 = m.g1;
  return n;
}

NoiseMoments NoiseMoments::deterministic(const Vec3& eta) {
  NoiseMoments n;
  n.mean = eta;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) n.second[a][b] = eta[a] * eta[b];
  return n;
}

double NoiseMoments::third(int a, int b, int c) const {
  // E[xyz] = m_x m_y m_z + m_x C_yz + m_y C_xz + m_z C_xy for Gaussian x, y, z.
  auto cov = [this](int i, int j) { return second[i][j] - mean[i] * mean[j]; };
  return mean[a] * mean[b] * mean[c] + mean[a] * cov(b, c) + mean[b] * cov(a, c) +
         mean[c] * cov(a, b);
}

}  // namespace modpulse
