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
#include <functional>

namespace modpulse {

struct QuadraturePolicy {
  double abs_tol = 1e-12;
  double rel_tol = 0;
  int max_subdivisions = 4000;
};

struct QuadratureResult {
  double value = 0;
  double error = 0;
  int intervals = 0;
};

// Globally adaptive bisection with the 61-point Gauss-Kronrod pair. Throws
// QuadratureError when the subdivision cap is reached above target.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadraturePolicy& policy = {});

namespace gk61 {

inline constexpr int kNodes = 61;

// Nodes in ascending order on [-1, 1]. `gauss` is zero at Kronrod-only
// nodes. `cumulative[i][j]` integrates the node interpolant from -1 to x_i.
struct Rule {
  std::array<double, kNodes> x;
  std::array<double, kNodes> kronrod;
  std::array<double, kNodes> gauss;
  std::array<std::array<double, kNodes>, kNodes> cumulative;
};

const Rule& rule();

void nodes(double a, double b, double* t);

struct PanelSum {
  double value = 0;
  double error = 0;
};

// Kronrod sum over [a, b] of samples f at nodes(a, b), with the usual
// QUADPACK error heuristic.
PanelSum integrate(double a, double b, const double* f);

// out[i] = integral of the interpolant of f from a to t_i.
void cumulative(double a, double b, const double* f, double* out);

}  // namespace gk61
}  // namespace modpulse
