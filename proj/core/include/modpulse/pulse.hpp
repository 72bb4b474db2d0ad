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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modpulse/linalg.hpp"

namespace modpulse {

// Rotation angle with the token it was written as ("pi", "pi/2", ...), so
// files can round-trip symbolic angles without float drift.
struct TargetAngle {
  double radians = 0;
  std::string token;

  static TargetAngle parse(const std::string& text);
  static TargetAngle pi();
  static TargetAngle half_pi();
  bool operator==(const TargetAngle& o) const { return radians == o.radians; }
};

enum class Family { AmPiecewise, AmContinuous, Fm, AmFm, FmSequence };

const char* family_name(Family f);
Family parse_family(const std::string& name);

// v = signs[k] * amplitude on the k-th segment between switching instants.
struct PiecewiseAmSpec {
  double amplitude = 0;
  std::vector<double> instants;
  std::vector<int> signs;  // instants.size() + 1 entries of +1/-1
  bool operator==(const PiecewiseAmSpec&) const = default;
};

// v = th/2 + (a - th/2) cos 2 pi t + (b - a) cos 4 pi t - b cos 6 pi t
struct ContinuousAmSpec {
  double a = 0, b = 0;
  bool operator==(const ContinuousAmSpec&) const = default;
};

struct FourierTerm {
  int index = 0;  // n in b_n; odd -> sine, even -> (cosine - 1)
  double value = 0;
  bool operator==(const FourierTerm&) const = default;
};

struct FmSpec {
  double amplitude = 0;
  std::vector<FourierTerm> coefficients;
  std::optional<double> switching_time;  // sin^2 transients when set
  bool operator==(const FmSpec&) const = default;

  double coefficient(int index) const;
  int max_index() const;
};

// Consecutive FM segments, each of unit length.
struct FmSequenceSpec {
  std::vector<FmSpec> segments;
  bool operator==(const FmSequenceSpec&) const = default;
};

using PulseShape = std::variant<PiecewiseAmSpec, ContinuousAmSpec, FmSpec, FmSequenceSpec>;

struct PulseSpec {
  TargetAngle target;
  double duration = 1;  // tau_p; only used to scale exported quantities
  PulseShape shape;
  std::string note;
  std::string dataset;
  int printed_decimals = 0;  // 0: parameters carry full precision

  Family family() const;
  // Length in units of tau_p (the number of segments for sequences).
  double length() const;
  bool operator==(const PulseSpec& o) const {
    return target == o.target && duration == o.duration && shape == o.shape;
  }
};

void validate(const PulseSpec& spec);

struct ControlSample {
  double t = 0;
  Vec3 v{0, 0, 0};
  double omega = 0;
  double envelope = 1;
};

ControlSample eval_control(const PulseSpec& spec, double t);

// psi(tau_p) = 2 int v for the fixed-axis families.
double total_angle_am(const PulseSpec& spec);

// Closed-form psi(t) for the fixed-axis families.
double am_angle(const PulseSpec& spec, double t);

double envelope(double t, std::optional<double> switching_time);

// Phase Omega(t) and its derivative, evaluated by harmonic recurrence.
class FmPhase {
 public:
  explicit FmPhase(const FmSpec& spec);
  double operator()(double t, double* derivative = nullptr) const;
  int harmonics() const { return static_cast<int>(sine_.size()); }

 private:
  std::vector<double> sine_, cosine_;
};

// Omega(1 - t) = Omega(-t): flips the sign of the odd coefficients.
FmSpec time_reverse(const FmSpec& spec);

// Times in [0, length] where the control loses smoothness, including ends.
std::vector<double> breakpoints(const PulseSpec& spec);

// max_t |v(t)|.
double peak_amplitude(const PulseSpec& spec);

// Upper bound on the angular rate scale of the control (rad per tau_p).
double rate_bound(const PulseSpec& spec);

std::vector<int> alternating_signs(std::size_t instants);

}  // namespace modpulse
