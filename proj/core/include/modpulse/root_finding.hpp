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
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace modpulse {

using VectorFunction = std::function<std::vector<double>(std::span<const double>)>;

struct SolverConfig {
  double acceptance = 1e-10;  // sum |f_i|
  int max_iterations = 200;
  int max_evaluations = 4000;
  double fd_step = 1e-7;      // relative to max(|x_j|, 1)
  double initial_radius = 100;
  double rank_tolerance = 1e-12;
  std::vector<std::uint64_t> seeds{20110915, 31415926, 27182818, 16180339};
};

enum class SolverStatus { Converged, Stalled, SingularJacobian, IterationLimit };

const char* status_name(SolverStatus s);

struct RootResult {
  std::vector<double> x;
  std::vector<double> f;
  double residue = 0;
  SolverStatus status = SolverStatus::IterationLimit;
  int iterations = 0;
  int evaluations = 0;
  bool converged() const { return status == SolverStatus::Converged; }
};

// Powell dogleg trust region with a forward-difference Jacobian refreshed by
// Broyden updates. Gauss-Newton steps are minimum-norm least-squares steps,
// so rank-deficient and non-square systems are accepted. On failure the best
// iterate is returned.
RootResult find_root(const VectorFunction& f, std::vector<double> x0, const SolverConfig& config = {});

// Jacobian by forward differences; exposed for tests.
std::vector<std::vector<double>> fd_jacobian(const VectorFunction& f, std::span<const double> x,
                                             std::span<const double> fx, double step);

}  // namespace modpulse
