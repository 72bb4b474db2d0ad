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
#include <cstdint>
#include <vector>

#include "modpulse/linalg.hpp"
#include "modpulse/noise_model.hpp"

namespace modpulse {

enum class NoiseGenerator { StaticGaussian, OrnsteinUhlenbeck };

// One sampled noise path. Static paths hold a single sample per component;
// OU paths hold one sample per entry of `times`.
struct NoiseRealization {
  NoiseGenerator generator = NoiseGenerator::StaticGaussian;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::array<std::vector<double>, 3> path;

  bool is_static() const { return generator == NoiseGenerator::StaticGaussian; }
  std::size_t samples() const { return path[0].size(); }
  Vec3 at(std::size_t k) const;
};

// Stream seed for path `index` of a run seeded with `seed`.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

NoiseRealization sample_static(const NoiseModel& model, std::uint64_t seed);

// Stationary OU path on `times` (ascending) with exact conditional updates.
// `tau_c` overrides model.tau_c when positive.
NoiseRealization sample_ou(const NoiseModel& model, const std::vector<double>& times, std::uint64_t seed,
                           double tau_c = 0);

// Image of a realization under the noise symmetry group: `quarter_turns`
// rotations about z of the transverse part and, if `flip`, negated
// fluctuations about the mean. The group leaves the noise law invariant.
NoiseRealization symmetry_image(const NoiseRealization& r, const NoiseModel& model, int quarter_turns, bool flip);

}  // namespace modpulse
