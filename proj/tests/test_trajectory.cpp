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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modpulse/error.hpp"
#include "modpulse/trajectory.hpp"
#include "oracle.hpp"

using namespace modpulse;
using std::numbers::pi;

namespace {

PulseSpec fm_spec(double amp, std::vector<FourierTerm> c, std::optional<double> ts = std::nullopt) {
  PulseSpec s;
  s.target = TargetAngle::pi();
  s.shape = FmSpec{amp, std::move(c), ts};
  return s;
}

}  // namespace

TEST(Trajectory, ConstantPhaseIsFixedAxisRotation) {
  const RotationTrajectory tr = propagate(fm_spec(2.5, {}));
  const RotationState st = tr.final_rotation();
  EXPECT_NEAR(st.psi, 5.0, 1e-12);
  EXPECT_NEAR(st.axis[0], 1, 1e-12);
}

TEST(Trajectory, FmPropagatorMatchesBruteForce) {
  const PulseSpec s = fm_spec(4.1, {{1, 0.3}, {2, -0.9}, {4, 0.4}}, 0.1);
  const RotationTrajectory tr = propagate(s);
  const oracle::M2 ref = oracle::brute_propagator(s, 40000);
  EXPECT_LT(oracle::distance(oracle::to_matrix(tr.final_state()), ref), 1e-7);
}

TEST(Trajectory, PropagatorStaysUnitary) {
  const RotationTrajectory tr = propagate(fm_spec(9, {{1, 1.2}, {2, 0.5}, {5, -0.8}}));
  for (int p = 0; p < tr.panel_count(); ++p)
    for (int i = 0; i < gk61::kNodes; ++i) EXPECT_NEAR(tr.states(p)[i].norm2(), 1, 1e-14);
}

TEST(Trajectory, PanelsCoverThePulseAndRespectBreakpoints) {
  const PulseSpec s = fm_spec(3, {{2, -1}}, 0.1);
  const auto edges = panel_edges(s, {});
  EXPECT_DOUBLE_EQ(edges.front(), 0);
  EXPECT_DOUBLE_EQ(edges.back(), 1);
  for (double b : breakpoints(s)) EXPECT_NE(std::find(edges.begin(), edges.end(), b), edges.end());
}

TEST(Trajectory, AmClosedFormMatchesBruteForce) {
  PulseSpec s;
  s.target = TargetAngle::pi();
  s.shape = ContinuousAmSpec{-1.92179255, 2.86838351};
  const RotationTrajectory tr = propagate(s);
  EXPECT_LT(oracle::distance(oracle::to_matrix(tr.final_state()), oracle::brute_propagator(s, 20000)), 1e-7);
}

TEST(Trajectory, DenseOutputInterpolates) {
  GridPolicy g;
  g.dense = true;
  const PulseSpec s = fm_spec(5, {{1, 0.5}, {2, -0.6}});
  const RotationTrajectory tr = propagate(s, g);
  PulseSpec head = s;
  for (double t : {0.137, 0.5, 0.861}) {
    // Reference: brute-force propagation up to t.
    oracle::M2 u = oracle::identity();
    const int n = 20000;
    const double h = t / n;
    for (int k = 0; k < n; ++k)
      u = oracle::expm(oracle::C(0, -h) * oracle::dot_sigma(eval_control(s, (k + 0.5) * h).v)) * u;
    EXPECT_LT(oracle::distance(oracle::to_matrix(tr.propagator_at(t)), u), 1e-7) << t;
  }
}

TEST(Trajectory, SphericalRatesMatchFiniteDifferences) {
  GridPolicy g;
  g.dense = true;
  const PulseSpec s = fm_spec(3.7, {{1, 0.4}, {2, -1.1}});
  const RotationTrajectory tr = propagate(s, g);
  const FmPhase ph(std::get<FmSpec>(s.shape));
  for (double t : {0.3, 0.55, 0.8}) {
    const double h = 1e-5;
    const RotationState a = tr.state_at(t - h), b = tr.state_at(t + h), m = tr.state_at(t);
    const SphericalRates r = derivatives_spherical(m, ph(t), 3.7);
    EXPECT_NEAR(r.dpsi, (b.psi - a.psi) / (2 * h), 1e-4);
    EXPECT_NEAR(r.dtheta, (b.theta() - a.theta()) / (2 * h), 1e-4);
    double dphi = b.phi() - a.phi();
    if (dphi > pi) dphi -= 2 * pi;
    if (dphi < -pi) dphi += 2 * pi;
    EXPECT_NEAR(r.dphi, dphi / (2 * h), 1e-4);
  }
}

TEST(Trajectory, SphericalChartSingularities) {
  EXPECT_THROW(derivatives_spherical(RotationState{0, Axis(1, 0, 0)}, 0, 1), ChartSingularity);
  EXPECT_THROW(derivatives_spherical(RotationState{1, Axis(0, 0, 1)}, 0, 1), ChartSingularity);
}

TEST(Trajectory, RefinementDoesNotMoveTheFinalState) {
  const PulseSpec s = fm_spec(8, {{2, -0.4}, {4, 0.45}, {6, -0.5}});
  GridPolicy fine;
  fine.refinement = 2;
  const Su2 a = propagate(s).final_state(), b = propagate(s, fine).final_state();
  EXPECT_NEAR(a.w, b.w, 1e-12);
  EXPECT_NEAR(a.x, b.x, 1e-12);
  EXPECT_NEAR(a.y, b.y, 1e-12);
  EXPECT_NEAR(a.z, b.z, 1e-12);
}
