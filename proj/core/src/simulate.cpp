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

#include "modpulse/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "modpulse/error.hpp"

namespace modpulse {

namespace {

constexpr double kGaussOffset = 0.28867513459481288225;  // 1 / (2 sqrt 3)
constexpr double kCommutator = 0.28867513459481288225;    // sqrt(3) / 6

// Generator of exp(-i g.sigma) for one slice with controls a1 (earlier) and
// a2 (later) at the two Gauss points.
inline Vec3 slice_generator(const Vec3& a1, const Vec3& a2, double h) {
  const Vec3 c = cross(a2, a1);
  return {0.5 * h * (a1[0] + a2[0]) + kCommutator * h * h * c[0],
          0.5 * h * (a1[1] + a2[1]) + kCommutator * h * h * c[1],
          0.5 * h * (a1[2] + a2[2]) + kCommutator * h * h * c[2]};
}

}  // namespace

int default_slices(const PulseSpec& spec) {
  const double n = 40 * rate_bound(spec) * spec.length();
  return std::clamp(static_cast<int>(std::ceil(n)), 1000, 40000);
}

SlicedPropagator::SlicedPropagator(const PulseSpec& spec, int slices) : slices_(slices) {
  validate(spec);
  if (slices < 1) throw SpecError("slice count must be positive");
  const double len = spec.length();
  h_ = len / slices;
  times_.resize(2 * static_cast<std::size_t>(slices));
  control_.resize(times_.size());
  for (int s = 0; s < slices; ++s) {
    const double mid = (s + 0.5) * h_;
    times_[2 * s] = mid - kGaussOffset * h_;
    times_[2 * s + 1] = mid + kGaussOffset * h_;
  }
  for (std::size_t k = 0; k < times_.size(); ++k) control_[k] = eval_control(spec, times_[k]).v;
  for (int s = 0; s < slices; ++s)
    p_ = su2_exp(slice_generator(control_[2 * s], control_[2 * s + 1], h_)) * p_;
}

Su2 SlicedPropagator::propagate(const NoiseRealization& noise, double scale) const {
  const bool st = noise.is_static();
  if (!st && noise.samples() != times_.size())
    throw SpecError("noise path is not sampled on the simulation grid");
  Su2 u;
  const Vec3 e0 = noise.at(0);
  for (int s = 0; s < slices_; ++s) {
    const Vec3 n1 = st ? e0 : noise.at(2 * s);
    const Vec3 n2 = st ? e0 : noise.at(2 * s + 1);
    const Vec3 a1 = control_[2 * s] + scale * n1;
    const Vec3 a2 = control_[2 * s + 1] + scale * n2;
    u = su2_exp(slice_generator(a1, a2, h_)) * u;
  }
  return u;
}

SimulationResult simulate_exact(const PulseSpec& spec, const NoiseRealization& noise, int slices, double scale) {
  const SlicedPropagator sp(spec, slices > 0 ? slices : default_slices(spec));
  SimulationResult r;
  r.p = sp.noiseless();
  r.up = sp.propagate(noise, scale);
  r.uc = r.p.adjoint() * r.up;
  return r;
}

}  // namespace modpulse
