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

#include <functional>
#include <span>
#include <vector>

#include "modpulse/root_finding.hpp"

namespace modpulse {

// A residual system with one more parameter than independent conditions.
// `spare` indexes the parameter that parametrizes the root curve; -1 marks
// a square system.
struct SpareProblem {
  VectorFunction residuals;
  std::function<double(std::span<const double>)> amplitude;
  int spare = -1;
  std::vector<double> start;
};

struct MinimizeConfig {
  SolverConfig solver;
  int scan_points = 9;
  double scan_halfwidth = 0.4;  // coarse scan covers spare0 +- halfwidth
  int max_extensions = 6;       // extra scan points when the minimum sits on an edge
  double spare_tolerance = 1e-4;
  unsigned workers = 0;
};

struct ScanPoint {
  double spare = 0;
  double amplitude = 0;
  bool feasible = false;
};

struct MinimizeResult {
  std::vector<double> x;
  double amplitude = 0;
  double residue = 0;
  bool feasible = false;
  int candidate = -1;
  std::vector<std::vector<ScanPoint>> traces;  // per candidate
};

// Scans the spare parameter of every candidate (9-point coarse scan, golden
// section on the bracket), solving the remaining square system with warm
// starts, and returns the feasible point of smallest amplitude. Ties go to
// the smaller |spare|, then the lower candidate index.
MinimizeResult minimize_amplitude(const std::vector<SpareProblem>& candidates,
                                  const MinimizeConfig& config = {});

}  // namespace modpulse
