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
#include <string>
#include <vector>

#include "modpulse/linalg.hpp"
#include "modpulse/noise_model.hpp"
#include "modpulse/pulse.hpp"

namespace modpulse {

// ||<U> - e^{i phi} 1||_2 minimized over the global phase. For a real
// quaternion average the optimal phase is 0 or pi.
double deviation_norm(const Su2& average);

// How the OU correlation time follows the noise scale. Physical keeps
// tau_c * lambda fixed, which is what shrinking tau_p at fixed noise does;
// PulseUnits keeps tau_c / tau_p fixed at every scale.
enum class CorrelationScaling { Physical, PulseUnits };

struct ScalingOptions {
  std::uint64_t seed = 20110915;
  std::size_t ensemble = 10000;
  int slices = 0;  // 0: default_slices(spec)
  unsigned workers = 0;
  bool symmetrize = true;  // average over the noise symmetry group
  CorrelationScaling correlation = CorrelationScaling::PulseUnits;
  double reference_scale = 0;  // scale at which tau_c applies; 0: largest
  double floor_sigmas = 3;     // points with d below this many sigmas are dropped
};

struct ScalePoint {
  double lambda = 0;
  double tau_c = 0;  // correlation time used at this scale (0 for static)
  Su2 average;       // <U_c>
  double d = 0;
  double sigma_d = 0;
  double averaging = 0;  // max_a |(<R(U_c)> - I) e_a|
  bool above_floor = true;
};

struct VerificationReport {
  std::vector<ScalePoint> points;
  std::size_t realizations = 0;
  double slope = 0;
  double slope_error = 0;
  double intercept = 0;
  std::size_t fitted_points = 0;
  bool noise_floor = false;  // some points were indistinguishable from zero
  std::string message;

  bool fitted() const { return fitted_points >= 2; }
};

// Ensemble-averaged correction <U_c> at each scale, and the weighted
// log-log slope of d against lambda. The same noise draws are reused at
// every scale.
VerificationReport scaling_exponent(const PulseSpec& spec, const NoiseModel& noise,
                                    const std::vector<double>& scales, const ScalingOptions& opts = {});

// Weighted least squares of log d on log lambda; sigma entries of zero give
// an unweighted fit.
struct LineFit {
  double slope = 0, slope_error = 0, intercept = 0;
};
LineFit fit_log_slope(const std::vector<double>& lambda, const std::vector<double>& d,
                      const std::vector<double>& sigma_d);

std::vector<double> geometric_scales(double lo, double hi, int count);

}  // namespace modpulse
