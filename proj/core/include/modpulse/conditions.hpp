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

#include <span>
#include <string>
#include <vector>

#include "modpulse/magnus.hpp"
#include "modpulse/noise_model.hpp"
#include "modpulse/pulse.hpp"
#include "modpulse/quadrature.hpp"
#include "modpulse/trajectory.hpp"

namespace modpulse {

struct NamedResidual {
  std::string name;
  double value = 0;
  double error = 0;  // quadrature error estimate
};

class ResidualVector {
 public:
  void add(std::string name, double value, double error = 0);
  void append(const ResidualVector& other);

  std::size_t size() const { return entries_.size(); }
  const NamedResidual& operator[](std::size_t i) const { return entries_[i]; }
  const std::vector<NamedResidual>& entries() const { return entries_; }
  const NamedResidual& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::vector<double> values() const;
  double residue() const;   // sum |f_i|
  double max_abs() const;

 private:
  std::vector<NamedResidual> entries_;
};

enum class AmMethod { Auto, ClosedForm, Quadrature };

// (int sin psi, int cos psi, psi(1) - theta [, int int sin(psi1 - psi2)]).
ResidualVector residual_am_dephasing(const PulseSpec& spec, int order,
                                     const QuadraturePolicy& policy = {},
                                     AmMethod method = AmMethod::Auto);

// (int n_xz, int n_yz, int n_zz).
ResidualVector residual_fm_first(const RotationTrajectory& tr);
// z-column double integrals (cross-product form).
ResidualVector residual_fm_second_dephasing(const RotationTrajectory& tr);
// mu2_1..3: transverse columns, mu2_4..6: z column.
ResidualVector residual_general_second(const RotationTrajectory& tr);
// psi(tau) - theta and, unless the target is a multiple of 2 pi, theta(tau) - pi/2.
ResidualVector boundary_residuals(const RotationTrajectory& tr, double target);

struct EvalOptions {
  GridPolicy grid;
  QuadraturePolicy quad;
  int max_refinement = 4;
};

// The full named residual list of a spec for the given order and noise
// model. FM trajectories are refined until the quadrature estimate meets the
// policy target.
ResidualVector evaluate_residuals(const PulseSpec& spec, int order, const NoiseModel& noise,
                                  const EvalOptions& options = {});

struct SystemRequest {
  PulseSpec ansatz;  // family, target, coefficient set, instants count, signs, tau_s
  int order = 1;
  NoiseModel noise;
  bool symmetric = false;
  EvalOptions eval;
  // Parameter points whose control rate bound exceeds this are treated like
  // invalid specs (every residual 1e3); 0 disables the guard. Shipped sets
  // stay below 130.
  double max_rate = 400;
};

// Residual-function handle over the free parameters of an ansatz.
//
// Parameter layouts:
//   am-piecewise  (tau_1..tau_n, v0); symmetric: (tau_1..tau_{n/2}, v0)
//   am-continuous (a, b)
//   fm / amfm     (V0, b_i for each ansatz coefficient in order);
//                 symmetric drops the odd coefficients
class ResidualSystem {
 public:
  explicit ResidualSystem(SystemRequest request);

  const SystemRequest& request() const { return req_; }
  const std::vector<std::string>& parameter_names() const { return params_; }
  const std::vector<std::string>& residual_names() const { return active_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::size_t residual_count() const { return active_.size(); }
  // Residuals not forced to vanish by the ansatz symmetry.
  std::size_t independent_residuals() const { return active_.size() - automatic_; }

  PulseSpec spec_for(std::span<const double> x) const;
  std::vector<double> parameters_of(const PulseSpec& spec) const;
  std::vector<double> operator()(std::span<const double> x) const;
  ResidualVector evaluate(std::span<const double> x) const;
  double amplitude(std::span<const double> x) const;
  int parameter_index(const std::string& name) const;

 private:
  SystemRequest req_;
  std::vector<std::string> params_;
  std::vector<std::string> active_;
  std::size_t automatic_ = 0;
  std::vector<int> coeff_index_;  // FM: b index of parameters 1..
};

ResidualSystem assemble_system(const SystemRequest& request);

inline constexpr double kFullPrecisionTolerance = 1e-9;

// 5x the largest residual change when each printed nonzero parameter moves
// by one unit in its last printed decimal. Full-precision specs get
// kFullPrecisionTolerance.
double sensitivity_tolerance(const PulseSpec& spec, int order, const NoiseModel& noise,
                             const EvalOptions& options = {});

struct CheckReport {
  ResidualVector residuals;
  double tolerance = 0;
  int order = 1;
  NoiseModel noise;
  bool passed() const;
};

CheckReport check_spec(const PulseSpec& spec, int order, const NoiseModel& noise,
                       double tolerance, const EvalOptions& options = {});

}  // namespace modpulse
