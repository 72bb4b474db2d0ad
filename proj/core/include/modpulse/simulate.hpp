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

#include <vector>

#include "modpulse/linalg.hpp"
#include "modpulse/noise_paths.hpp"
#include "modpulse/pulse.hpp"

namespace modpulse {

struct SimulationResult {
  Su2 up;  // full propagator with noise
  Su2 p;   // noiseless propagator on the same slicing
  Su2 uc;  // P^{-1} U_p
};

// Uniform slicing of the pulse with two Gauss points per slice. Control
// samples are cached so only the noise changes between realizations. Each
// slice uses the fourth-order two-point Magnus generator, exponentiated
// exactly, so every slice propagator is unitary.
class SlicedPropagator {
 public:
  SlicedPropagator(const PulseSpec& spec, int slices);

  int slices() const { return slices_; }
  // Times at which noise paths must be sampled (2 per slice, ascending).
  const std::vector<double>& sample_times() const { return times_; }
  const Su2& noiseless() const { return p_; }

  // Propagator with the noise scaled by `scale` (dimensionless noise x tau_p).
  Su2 propagate(const NoiseRealization& noise, double scale) const;
  Su2 correction(const NoiseRealization& noise, double scale) const { return p_.adjoint() * propagate(noise, scale); }

 private:
  int slices_;
  double h_;
  std::vector<double> times_;
  std::vector<Vec3> control_;
  Su2 p_;
};

// Default slice count: enough that doubling changes the propagator by less
// than ~1e-10 for the usual amplitudes.
int default_slices(const PulseSpec& spec);

SimulationResult simulate_exact(const PulseSpec& spec, const NoiseRealization& noise, int slices = 0,
                                double scale = 1);

}  // namespace modpulse
