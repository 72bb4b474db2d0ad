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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "modpulse/conditions.hpp"
#include "modpulse/pulse.hpp"
#include "modpulse/root_finding.hpp"
#include "modpulse/verify.hpp"

namespace modpulse {

// A pulse file: the pulse plus the condition set it was designed for.
//
//   family = fm
//   theta = pi
//   amplitude = 3.751157
//   coefficients = 2:-1.090479, 4:-0.588913
//   order = 1
//   noise = dephasing
//
// fm-sequence files carry one [segment] block per FM segment.
struct SpecDocument {
  PulseSpec spec;
  int order = 1;
  std::string noise = "dephasing";  // dephasing | general
  std::string bath = "classical";   // quantum entries are listed but not evaluated

  bool quantum() const { return bath == "quantum"; }
  NoiseModel noise_model() const;
};

SpecDocument parse_spec(std::istream& in);
SpecDocument parse_spec_string(const std::string& text);
SpecDocument load_spec(const std::filesystem::path& path);
// Every number is written with 17 significant digits, so parse(serialize(s)) == s.
std::string serialize_spec(const SpecDocument& doc);
void save_spec(const SpecDocument& doc, const std::filesystem::path& path);

// Numerical knobs, read from the [numerics] section of a config file.
struct NumericsConfig {
  EvalOptions eval;
  SolverConfig solver;
  ScalingOptions scaling;
};
NumericsConfig parse_config(std::istream& in);
NumericsConfig load_config(const std::filesystem::path& path);

// Columns t, v_x, v_y, v_z, Omega, f with t and v in physical units of tau_p.
void write_waveform(std::ostream& out, const PulseSpec& spec, int samples);
// Columns t, psi, phi, theta, a_x, a_y, a_z of the global rotation.
void write_trajectory(std::ostream& out, const PulseSpec& spec, int samples);

// MODPULSE_DATA_DIR, then the installed share directory, then the source tree.
std::filesystem::path data_directory();
// All shipped parameter sets, ordered by file name.
std::vector<SpecDocument> load_datasets(const std::filesystem::path& dir = data_directory());
SpecDocument find_dataset(const std::string& name, const std::filesystem::path& dir = data_directory());

}  // namespace modpulse
