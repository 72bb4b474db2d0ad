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

#include "modpulse/ode.hpp"
#include "modpulse/pulse.hpp"
#include "modpulse/quadrature.hpp"
#include "modpulse/rotation.hpp"

namespace modpulse {

struct GridPolicy {
  double max_panel_width = 0;  // 0 selects the width from the control rate
  double panel_phase = 6.0;    // rad of control rate per automatic panel
  int refinement = 0;          // each level halves every panel
  OdeTolerance ode;
  bool dense = false;          // keep Hermite dense output for state_at()
};

// Global rotation P(t) = exp(-i psi/2 a.sigma) sampled at the Gauss-Kronrod
// nodes of consecutive panels. Panels never straddle a control breakpoint.
class RotationTrajectory {
 public:
  int panel_count() const { return static_cast<int>(edges_.size()) - 1; }
  double panel_begin(int p) const { return edges_[p]; }
  double panel_end(int p) const { return edges_[p + 1]; }
  const double* times(int p) const { return &times_[p * gk61::kNodes]; }
  const Su2* states(int p) const { return &states_[p * gk61::kNodes]; }
  const Su2& final_state() const { return final_; }
  double length() const { return edges_.back(); }
  const PulseSpec& spec() const { return spec_; }
  const OdeStats& stats() const { return stats_; }
  const GridPolicy& grid() const { return grid_; }
  bool has_dense_output() const { return closed_form_ || !dense_.empty(); }

  // Propagator at arbitrary t (closed form or cubic Hermite dense output).
  Su2 propagator_at(double t) const;
  RotationState state_at(double t) const;
  RotationState final_rotation() const;
  // Direction of the control at t = 0, the limiting axis of the rotation.
  const Axis& initial_axis() const { return initial_axis_; }

 private:
  friend RotationTrajectory propagate(const PulseSpec&, const GridPolicy&);
  struct DenseStep {
    double t0, t1;
    std::array<double, 4> y0, f0, y1, f1;
  };

  PulseSpec spec_;
  GridPolicy grid_;
  std::vector<double> edges_;
  std::vector<double> times_;
  std::vector<Su2> states_;
  Su2 final_;
  Axis initial_axis_;
  bool closed_form_ = false;
  std::vector<DenseStep> dense_;
  OdeStats stats_;
};

RotationTrajectory propagate(const PulseSpec& spec, const GridPolicy& grid = {});

// Panel edges used by propagate() for this spec and policy.
std::vector<double> panel_edges(const PulseSpec& spec, const GridPolicy& grid);

struct SphericalRates {
  double dpsi = 0, dphi = 0, dtheta = 0;
};

// Right-hand sides of the (psi, phi, theta) equations of motion for a drive
// of magnitude `amplitude` and phase `omega`. Throws ChartSingularity where
// the chart degenerates.
SphericalRates derivatives_spherical(const RotationState& state, double omega, double amplitude);

}  // namespace modpulse
