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
// Invariants that hold for every input; each test sweeps seeded random cases.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "modpulse/amplitude_minimizer.hpp"
#include "modpulse/conditions.hpp"
#include "modpulse/magnus.hpp"
#include "modpulse/noise_paths.hpp"
#include "modpulse/root_finding.hpp"
#include "modpulse/rotation.hpp"
#include "modpulse/simulate.hpp"
#include "modpulse/spec_io.hpp"
#include "modpulse/trajectory.hpp"
#include "modpulse/verify.hpp"

using namespace modpulse;
using std::numbers::pi;

namespace {

const std::filesystem::path kData = MODPULSE_TEST_DATA_DIR;

Su2 random_su2(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Su2 q;
  q.w = g(rng), q.x = g(rng), q.y = g(rng), q.z = g(rng);
  const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
  q.w /= n, q.x /= n, q.y /= n, q.z /= n;
  return q;
}

PulseSpec random_fm(std::mt19937_64& rng, bool even_only = false, bool envelope = false) {
  std::uniform_real_distribution<double> u(-1, 1);
  FmSpec f;
  f.amplitude = 2 + 4 * std::fabs(u(rng));
  for (int i = 1; i <= 6; ++i)
    if (!even_only || i % 2 == 0) f.coefficients.push_back({i, 0.6 * u(rng)});
  if (envelope) f.switching_time = 0.05 + 0.1 * std::fabs(u(rng));
  PulseSpec s;
  s.target = TargetAngle::pi();
  s.shape = f;
  return s;
}

double su2_norm(const Su2& p) { return std::sqrt(p.norm2()); }

// Distance up to the global sign of the quaternion.
double su2_distance(const Su2& a, const Su2& b) {
  const Su2 m{a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  const Su2 p{a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  return std::sqrt(std::min(m.norm2(), p.norm2()));
}

}  // namespace

TEST(Property, RotationMatricesAreSpecialOrthogonal) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const Mat3 r = rotation_matrix(random_su2(rng));
    double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                 r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    EXPECT_NEAR(det, 1, 1e-12);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int a = 0; a < 3; ++a) s += r[a][i] * r[a][j];
        EXPECT_NEAR(s, i == j ? 1 : 0, 1e-12);
      }
  }
}

TEST(Property, RotatedNoisePreservesNorm) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> ang(0, 4 * pi);
  for (int k = 0; k < 200; ++k) {
    const Axis a(g(rng), g(rng), g(rng));
    const Vec3 e{g(rng), g(rng), g(rng)};
    const Vec3 r = rotated_noise(a, ang(rng), e);
    EXPECT_NEAR(std::hypot(r[0], r[1], r[2]), std::hypot(e[0], e[1], e[2]), 1e-12);
  }
}

TEST(Property, AxisAnglesRoundTripAwayFromPoles) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phi(-pi + 1e-9, pi), theta(1e-3, pi - 1e-3);
  for (int k = 0; k < 200; ++k) {
    const double p = phi(rng), t = theta(rng);
    const Axis a = Axis::from_angles(p, t);
    EXPECT_NEAR(a.phi(), p, 1e-12);
    EXPECT_NEAR(a.theta(), t, 1e-12);
    EXPECT_NEAR(std::hypot(a[0], a[1], a[2]), 1, 1e-12);
    const Axis b(a.vec());
    EXPECT_GE(b.theta(), 0);
    EXPECT_LE(b.theta(), pi);
    EXPECT_GT(b.phi(), -pi);
    EXPECT_LE(b.phi(), pi);
  }
}

TEST(Property, QuaternionProductsStayNormalized) {
  std::mt19937_64 rng(4);
  Su2 p;
  for (int k = 0; k < 1000; ++k) p = random_su2(rng) * p;
  EXPECT_NEAR(su2_norm(p), 1, 1e-12);
}

TEST(Property, MagnusTermsAreLinearInMoments) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 5; ++k) {
    const RotationTrajectory tr = propagate(random_fm(rng));
    const NoiseModel a = NoiseModel::general(1.0, 0.5, 0.25);
    NoiseModel b = a;
    b.eta_bar_z *= 2;
    const Vec3 h1a = magnus_term(1, tr, a), h1b = magnus_term(1, tr, b);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(h1b[i], 2 * h1a[i], 1e-12 * (1 + std::fabs(h1a[i])));
    // Second order: doubling every second moment doubles the term.
    NoiseMoments m = NoiseMoments::from(a), m2 = m;
    for (auto& row : m2.second)
      for (double& x : row) x *= 2;
    const Vec3 h2a = magnus_term(2, tr, m), h2b = magnus_term(2, tr, m2);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(h2b[i], 2 * h2a[i], 1e-12 * (1 + std::fabs(h2a[i])));
  }
}

TEST(Property, FixedAxisSecondOrderTermIsAlongY) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int k = 0; k < 10; ++k) {
    std::vector<double> t{u(rng), u(rng), u(rng), u(rng)};
    std::sort(t.begin(), t.end());
    PulseSpec s;
    s.shape = PiecewiseAmSpec{1 + 6 * u(rng), t, alternating_signs(4)};
    const Vec3 h2 = magnus_term(2, propagate(s), NoiseModel::pure_dephasing(1.0, 1.0));
    EXPECT_LT(std::fabs(h2[0]), 1e-10);
    EXPECT_LT(std::fabs(h2[2]), 1e-10);
  }
}

TEST(Property, ResidualZeroSetIsInvariantUnderMomentRescaling) {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 5; ++k) {
    const PulseSpec s = random_fm(rng);
    const auto a = evaluate_residuals(s, 2, NoiseModel::general(1, 1, 1));
    const auto b = evaluate_residuals(s, 2, NoiseModel::general(10, 10, 10));
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i].value, b[i].value, 1e-12) << a[i].name;
  }
}

TEST(Property, UnshapedPulseExceedsHalfInFirstOrder) {
  for (double amp : {pi / 2, pi / 4}) {
    PulseSpec s;
    s.target = TargetAngle::parse(amp == pi / 2 ? "pi" : "pi/2");
    s.shape = PiecewiseAmSpec{amp, {}, {1}};
    const auto r = evaluate_residuals(s, 1, NoiseModel::pure_dephasing());
    EXPECT_GT(std::max(std::fabs(r.at("mu1_1").value), std::fabs(r.at("mu1_2").value)), 0.5);
  }
}

TEST(Property, EnvelopeBoundaryPlateauAndMirror) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1), ts(0.01, 0.5);
  for (int k = 0; k < 50; ++k) {
    const double s = ts(rng);
    EXPECT_NEAR(envelope(0, s), 0, 1e-15);
    EXPECT_NEAR(envelope(1, s), 0, 1e-15);
    const double t = u(rng);
    EXPECT_NEAR(envelope(t, s), envelope(1 - t, s), 1e-12);
    if (t >= s && t <= 1 - s) EXPECT_EQ(envelope(t, s), 1);
    EXPECT_NEAR(envelope(s + 1e-9, s), envelope(s - 1e-9, s), 1e-8);
  }
}

TEST(Property, FmControlMagnitudeIsConstant) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) {
    const PulseSpec s = random_fm(rng);
    const double v0 = std::get<FmSpec>(s.shape).amplitude;
    for (int i = 0; i <= 1000; ++i) {
      const ControlSample c = eval_control(s, i / 1000.0);
      EXPECT_NEAR(std::hypot(c.v[0], c.v[1]), v0, 1e-12);
      EXPECT_EQ(c.v[2], 0);
    }
  }
}

TEST(Property, SymmetricPiecewiseControlIsMirrored) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.01, 0.49);
  for (int k = 0; k < 10; ++k) {
    double a = u(rng), b = u(rng);
    if (a > b) std::swap(a, b);
    PulseSpec s;
    s.shape = PiecewiseAmSpec{3, {a, b, 1 - b, 1 - a}, alternating_signs(4)};
    for (int i = 0; i <= 997; ++i) {
      const double t = i / 997.0;
      EXPECT_EQ(eval_control(s, t).v[1], eval_control(s, 1 - t).v[1]) << t;
    }
  }
}

TEST(Property, TrajectoryStaysUnitaryAndReconstructs) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    const RotationTrajectory tr = propagate(random_fm(rng, false, k % 2 == 1));
    for (int p = 0; p < tr.panel_count(); ++p)
      for (int i = 0; i < gk61::kNodes; ++i) {
        const Su2& q = tr.states(p)[i];
        EXPECT_NEAR(su2_norm(q), 1, 1e-10);
        const Su2 back = RotationState::from_su2(q).to_su2();
        EXPECT_LT(su2_distance(back, q), 1e-9);
      }
  }
}

TEST(Property, EvenFmPulsesEndInThePlane) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    const RotationTrajectory tr = propagate(random_fm(rng, true));
    EXPECT_NEAR(tr.final_rotation().theta(), pi / 2, 1e-9);
  }
}

TEST(Property, GridRefinementLeavesAngleUnchanged) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 3; ++k) {
    const PulseSpec s = random_fm(rng);
    GridPolicy fine;
    fine.refinement = 1;
    EXPECT_NEAR(propagate(s).final_rotation().psi, propagate(s, fine).final_rotation().psi, 1e-10);
  }
}

TEST(Property, RootFinderNeverClaimsFalseSuccess) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 30; ++k) {
    const double c0 = u(rng), c1 = u(rng);
    const VectorFunction f = [&](std::span<const double> x) {
      return std::vector<double>{std::sin(x[0]) + x[1] * x[1] - c0, x[0] * x[1] + std::cos(x[1]) - c1};
    };
    SolverConfig cfg;
    cfg.max_iterations = 40;
    const RootResult r = find_root(f, {u(rng), u(rng)}, cfg);
    double res = 0;
    for (double v : f(r.x)) res += std::fabs(v);
    if (r.converged()) {
      EXPECT_LT(r.residue, cfg.acceptance);
      EXPECT_LT(res, cfg.acceptance);
    }
  }
}

TEST(Property, MinimizerKeepsFeasibility) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> u(0.5, 2);
  for (int k = 0; k < 5; ++k) {
    const double c = u(rng), w = u(rng);
    SpareProblem p;
    p.residuals = [c](std::span<const double> x) { return std::vector<double>{x[0] - c * std::sin(x[1])}; };
    p.amplitude = [w](std::span<const double> x) { return 5 + std::cos(w * x[1]) + x[0] * x[0]; };
    p.spare = 1;
    p.start = {c * std::sin(0.3), 0.3};
    MinimizeConfig cfg;
    const MinimizeResult m = minimize_amplitude({p}, cfg);
    EXPECT_LT(std::fabs(p.residuals(m.x)[0]), cfg.solver.acceptance);
  }
}

TEST(Property, TimeReversedSecondOrderPulseStaysSecondOrder) {
  for (const char* name : {"table3-pi", "table6-pi"}) {
    const SpecDocument d = find_dataset(name, kData);
    const NoiseModel n = d.noise_model();
    const double tol = sensitivity_tolerance(d.spec, 2, n);
    PulseSpec r = d.spec;
    r.shape = time_reverse(std::get<FmSpec>(d.spec.shape));
    const auto a = evaluate_residuals(d.spec, 2, n), b = evaluate_residuals(r, 2, n);
    EXPECT_LT(b.max_abs(), tol) << name;
    for (std::size_t i = 0; i < a.size(); ++i)
      EXPECT_NEAR(std::fabs(a[i].value), std::fabs(b[i].value), 1e-9) << name << " " << a[i].name;
  }
}

TEST(Property, SerializedSpecsRecheckIdentically) {
  std::mt19937_64 rng(16);
  for (int k = 0; k < 5; ++k) {
    SpecDocument d;
    d.spec = random_fm(rng, false, k % 2 == 0);
    d.order = 2;
    const SpecDocument back = parse_spec_string(serialize_spec(d));
    const auto a = evaluate_residuals(d.spec, 2, d.noise_model()).values();
    const auto b = evaluate_residuals(back.spec, 2, back.noise_model()).values();
    EXPECT_EQ(a, b);
  }
}

TEST(Property, SimulationIsUnitaryForAnySliceCount) {
  std::mt19937_64 rng(17);
  NoiseModel m = NoiseModel::general();
  m.tau_c = 0.3;
  for (int slices : {1, 7, 100, 2500}) {
    const PulseSpec s = random_fm(rng);
    const SlicedPropagator prop(s, slices);
    const NoiseRealization r = sample_ou(m, prop.sample_times(), path_seed(3, slices));
    EXPECT_NEAR(su2_norm(prop.propagate(r, 0.7)), 1, 1e-12);
    EXPECT_NEAR(su2_norm(prop.correction(r, 0.7)), 1, 1e-12);
  }
}

TEST(Property, StaticPathsAreConstant) {
  const NoiseRealization r = sample_static(NoiseModel::general(), 4);
  EXPECT_TRUE(r.is_static());
  EXPECT_EQ(r.at(0)[0], r.at(17)[0]);
  EXPECT_EQ(r.at(3)[2], r.at(1000)[2]);
}

TEST(Property, VeryLongCorrelationMatchesStaticAverage) {
  const SpecDocument d = find_dataset("table2-pi", kData);
  ScalingOptions o;
  o.ensemble = 2000;
  NoiseModel slow = NoiseModel::pure_dephasing(1.0, 1.0);
  slow.tau_c = 1e6;
  const auto a = scaling_exponent(d.spec, NoiseModel::pure_dephasing(1.0, 1.0), {0.1}, o);
  const auto b = scaling_exponent(d.spec, slow, {0.1}, o);
  const double err = 3 * std::hypot(a.points[0].sigma_d, b.points[0].sigma_d) + 1e-4 * a.points[0].d;
  EXPECT_NEAR(a.points[0].d, b.points[0].d, err);
}

TEST(Property, SeededReportsAreBitIdentical) {
  const SpecDocument d = find_dataset("table3-pi", kData);
  ScalingOptions o;
  o.ensemble = 200;
  NoiseModel n = NoiseModel::general();
  n.tau_c = 2;
  const auto a = scaling_exponent(d.spec, n, {0.05, 0.1}, o);
  const auto b = scaling_exponent(d.spec, n, {0.05, 0.1}, o);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].average.w, b.points[i].average.w);
    EXPECT_EQ(a.points[i].average.z, b.points[i].average.z);
  }
  const NoiseRealization x = sample_ou(n, {0, 0.5, 1}, 42), y = sample_ou(n, {0, 0.5, 1}, 42);
  EXPECT_EQ(x.path, y.path);
}
