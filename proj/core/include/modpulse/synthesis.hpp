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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modpulse/amplitude_minimizer.hpp"
#include "modpulse/conditions.hpp"
#include "modpulse/root_finding.hpp"

namespace modpulse {

struct SynthesisRequest {
  Family family = Family::Fm;
  int order = 1;
  TargetAngle target = TargetAngle::pi();
  NoiseModel noise;
  bool symmetric = false;
  std::vector<int> coefficients;         // FM ansatz; empty picks the default set
  int instants = 4;                      // piecewise AM
  std::optional<double> switching_time;  // AM+FM transients
  bool minimize = false;                 // scan the spare coefficient for minimal amplitude
  std::vector<PulseSpec> starts;         // explicit starts, e.g. shipped tables
  int cold_starts = 8;                   // seeded starts used when `starts` is empty
  std::uint64_t seed = 20110915;
  bool first_success = true;             // stop cold starts at the first root
  int minimize_starts = 2;               // cold roots per spare choice kept for the amplitude scan
  SolverConfig solver;
  MinimizeConfig minimizer;
  EvalOptions eval;
};

struct SynthesisLogEntry {
  int start = 0;
  std::string origin;
  double residue = 0;
  double amplitude = 0;
  std::string status;
};

struct SynthesisResult {
  PulseSpec spec;
  ResidualVector residuals;
  std::vector<SynthesisLogEntry> log;
  std::string provenance;
  bool success = false;
};

// Default FM coefficient indices for an order/noise combination, and the
// extra coefficients tried as the spare direction when minimizing.
std::vector<int> default_coefficients(int order, const NoiseModel& noise);
std::vector<int> spare_choices(int order, const NoiseModel& noise);

// Empty ansatz spec for a request (coefficients/instants zero, signs set).
PulseSpec ansatz_for(const SynthesisRequest& request, const std::vector<int>& coefficients);

// Deterministic seeded cold starts for a system.
std::vector<std::vector<double>> cold_starts(const ResidualSystem& system, int count, std::uint64_t seed);

SynthesisResult synthesize(const SynthesisRequest& request);

// Forward pulse followed by its time reverse Omega(tau_p - t); the net
// rotation is 2 pi (propagator -1). Throws SpecError if the input fails the
// second-order general-decoherence check at `tolerance`.
PulseSpec compose_xy8_replacement(const PulseSpec& pi_spec, double tolerance);

}  // namespace modpulse
