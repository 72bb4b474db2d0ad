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

#include "brute_residuals.hpp"
#include "modpulse/noise_paths.hpp"
#include "modpulse/simulate.hpp"
#include "modpulse/spec_io.hpp"
#include "modpulse/verify.hpp"

using namespace modpulse;
using std::numbers::pi;

namespace {

const std::filesystem::path kData = MODPULSE_TEST_DATA_DIR;

PulseSpec unshaped() {
  PulseSpec s;
  s.shape = PiecewiseAmSpec{pi / 2, {}, {1}};
  return s;
}

oracle::M2 quaternion_matrix(const Su2& p) { return oracle::to_matrix(p); }

}  // namespace

TEST(NoisePaths, OrnsteinUhlenbeckStatistics) {
  NoiseModel m = NoiseModel::general(0.5, 2.0, 0.7);
  m.tau_c = 0.2;
  std::vector<double> times;
  for (int k = 0; k <= 100; ++k) times.push_back(0.01 * k);
  const int n = 6000;
  double mean = 0, var = 0, cov = 0, xvar = 0;
  for (int i = 0; i < n; ++i) {
    const NoiseRealization r = sample_ou(m, times, path_seed(99, i));
    const double a = r.path[2][40] - 0.5, b = r.path[2][60] - 0.5;
    mean += r.path[2][40];
    var += a * a;
    cov += a * b;
    xvar += r.path[0][90] * r.path[0][90];
  }
  mean /= n;
  var /= n;
  cov /= n;
  xvar /= n;
  // Standard errors: sqrt(s2/n), sqrt(2/n) s2.
  EXPECT_NEAR(mean, 0.5, 4 * std::sqrt(2.0 / n));
  EXPECT_NEAR(var, 2.0, 4 * std::sqrt(2.0 / n) * 2.0);
  EXPECT_NEAR(xvar, 0.7, 4 * std::sqrt(2.0 / n) * 0.7);
  EXPECT_NEAR(cov, 2.0 * std::exp(-0.2 / 0.2), 4 * std::sqrt(2.0 / n) * 2.0);
}

TEST(NoisePaths, StaticDrawsHaveModelMoments) {
  const NoiseModel m = NoiseModel::general(1.0, 0.25, 4.0);
  const int n = 8000;
  double mz = 0, vz = 0, vx = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 e = sample_static(m, path_seed(5, i)).at(0);
    mz += e[2];
    vz += (e[2] - 1) * (e[2] - 1);
    vx += e[0] * e[0];
  }
  EXPECT_NEAR(mz / n, 1.0, 4 * std::sqrt(0.25 / n));
  EXPECT_NEAR(vz / n, 0.25, 4 * std::sqrt(2.0 / n) * 0.25);
  EXPECT_NEAR(vx / n, 4.0, 4 * std::sqrt(2.0 / n) * 4.0);
}

TEST(NoisePaths, LongCorrelationTimeFreezesPath) {
  NoiseModel m = NoiseModel::general();
  std::vector<double> times;
  for (int k = 0; k <= 200; ++k) times.push_back(0.005 * k);
  const NoiseRealization r = sample_ou(m, times, 3, 1e6);
  double drift = 0;
  for (int c = 0; c < 3; ++c)
    for (double v : r.path[c]) drift = std::max(drift, std::fabs(v - r.path[c][0]));
  EXPECT_LT(drift, 1e-2);
}

TEST(NoisePaths, SymmetryImagesPreserveLaw) {
  const NoiseModel m = NoiseModel::general(1.0, 1.0, 1.0);
  const NoiseRealization r = sample_static(m, 11);
  const Vec3 e = r.at(0);
  const Vec3 q = symmetry_image(r, m, 1, false).at(0);
  EXPECT_DOUBLE_EQ(q[0] * q[0] + q[1] * q[1], e[0] * e[0] + e[1] * e[1]);
  EXPECT_DOUBLE_EQ(q[2], e[2]);
  const Vec3 f = symmetry_image(r, m, 0, true).at(0);
  EXPECT_NEAR(f[2] - 1, -(e[2] - 1), 1e-15);
  EXPECT_NEAR(f[0], -e[0], 1e-15);
}

TEST(Simulate, StaticNoiseMatchesBruteForce) {
  const SpecDocument t2 = find_dataset("table2-pi", kData);
  NoiseRealization r;
  r.path = {{{0.3}, {-0.2}, {0.8}}};
  const double scale = 0.4;
  const SimulationResult s = simulate_exact(t2.spec, r, 4000, scale);
  const oracle::M2 ref = oracle::brute_propagator(t2.spec, 40000, {0.3 * scale, -0.2 * scale, 0.8 * scale});
  EXPECT_LT(oracle::distance(quaternion_matrix(s.up), ref), 1e-6);
  EXPECT_NEAR(s.up.w * s.up.w + s.up.x * s.up.x + s.up.y * s.up.y + s.up.z * s.up.z, 1, 1e-12);
}

TEST(Simulate, FreePrecessionIsExact) {
  // A zero-amplitude FM segment leaves only the static field.
  PulseSpec s;
  s.target = TargetAngle::parse("2pi");
  s.shape = FmSequenceSpec{{FmSpec{0, {}, std::nullopt}}};
  NoiseRealization r;
  r.path = {{{0.0}, {0.0}, {1.3}}};
  const SimulationResult out = simulate_exact(s, r, 50);
  EXPECT_NEAR(out.up.w, std::cos(1.3), 1e-14);
  EXPECT_NEAR(out.up.z, std::sin(1.3), 1e-14);
}

TEST(Simulate, NoiselessTable2IsPiRotationInPlane) {
  const SpecDocument t2 = find_dataset("table2-pi", kData);
  NoiseRealization r;
  r.path = {{{0.0}, {0.0}, {0.0}}};
  const SimulationResult s = simulate_exact(t2.spec, r);
  EXPECT_LT(deviation_norm(s.uc), 1e-13);
  EXPECT_NEAR(s.p.w, 0, 1e-5);
  EXPECT_NEAR(s.p.z, 0, 1e-5);
  EXPECT_NEAR(std::hypot(s.p.x, s.p.y), 1, 1e-10);
}

TEST(Simulate, CorrectionIsUnitaryUnderOuNoise) {
  const SpecDocument t3 = find_dataset("table3-pi", kData);
  const SlicedPropagator prop(t3.spec, default_slices(t3.spec));
  NoiseModel m = NoiseModel::general();
  m.tau_c = 0.5;
  for (int i = 0; i < 5; ++i) {
    const Su2 u = prop.correction(sample_ou(m, prop.sample_times(), path_seed(1, i)), 0.3);
    EXPECT_NEAR(u.w * u.w + u.x * u.x + u.y * u.y + u.z * u.z, 1, 1e-12);
  }
}

TEST(Verify, DeviationNormIgnoresGlobalSign) {
  EXPECT_EQ(deviation_norm(Su2{}), 0);
  Su2 m;
  m.w = -1;
  EXPECT_NEAR(deviation_norm(m), 0, 1e-15);
  const double e = 0.01;
  Su2 r;
  r.w = std::cos(e / 2);
  r.x = std::sin(e / 2);
  EXPECT_NEAR(deviation_norm(r), 2 * std::sin(e / 4), 1e-15);
  Su2 shrink;
  shrink.w = 0.9;
  EXPECT_NEAR(deviation_norm(shrink), 0.1, 1e-15);
}

TEST(Verify, LogSlopeFitRecoversPowerLaw) {
  const auto l = geometric_scales(0.01, 0.1, 5);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_NEAR(l.front(), 0.01, 1e-15);
  EXPECT_NEAR(l.back(), 0.1, 1e-15);
  std::vector<double> d, s(5, 0.0);
  for (double x : l) d.push_back(3 * std::pow(x, 2.5));
  const LineFit f = fit_log_slope(l, d, s);
  EXPECT_NEAR(f.slope, 2.5, 1e-12);
  EXPECT_NEAR(std::exp(f.intercept), 3, 1e-10);
}

TEST(Verify, UnshapedPulseScalesLinearly) {
  ScalingOptions o;
  o.ensemble = 2000;
  const auto rep = scaling_exponent(unshaped(), NoiseModel::pure_dephasing(1.0, 1.0), geometric_scales(0.01, 0.2, 5), o);
  ASSERT_TRUE(rep.fitted());
  EXPECT_NEAR(rep.slope, 1, 0.05);
}

TEST(Verify, ScanIsDeterministic) {
  ScalingOptions o;
  o.ensemble = 400;
  const SpecDocument t2 = find_dataset("table2-pi", kData);
  const auto n = NoiseModel::pure_dephasing(1.0, 1.0);
  const auto a = scaling_exponent(t2.spec, n, {0.05, 0.1}, o);
  const auto b = scaling_exponent(t2.spec, n, {0.05, 0.1}, o);
  EXPECT_EQ(a.slope, b.slope);
  EXPECT_EQ(a.points[1].d, b.points[1].d);
  EXPECT_EQ(a.points[0].average.x, b.points[0].average.x);
}

TEST(Verify, Table7LossFollowsSecondCumulant) {
  // Transverse static noise leaves d = (lambda^2 / 2) s_x^2 (|N_x|^2 + |N_y|^2)
  // with N_b the time integral of the b-th toggling-frame column.
  const SpecDocument t7 = find_dataset("table7-pi", kData);
  const int slices = 100000;
  const double h = t7.spec.length() / slices;
  oracle::M2 p = oracle::identity();
  auto cols = oracle::columns(p);
  std::array<Vec3, 2> n{};
  for (int k = 0; k < slices; ++k) {
    p = oracle::slice_exp(eval_control(t7.spec, (k + 0.5) * h).v, h) * p;
    const auto next = oracle::columns(p);
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 3; ++a) n[b][a] += 0.5 * h * (cols[b][a] + next[b][a]);
    cols = next;
  }
  double n2 = 0;
  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 3; ++a) n2 += n[b][a] * n[b][a];
  const double lambda = 0.02;
  const double predicted = 0.5 * lambda * lambda * n2;

  ScalingOptions o;
  o.ensemble = 4000;
  const auto rep = scaling_exponent(t7.spec, NoiseModel::general(), {lambda}, o);
  EXPECT_NEAR(rep.points[0].d / predicted, 1, 0.05);
}

TEST(Verify, IdentityCorrectionHasZeroAveraging) {
  const SpecDocument t2 = find_dataset("table2-pi", kData);
  ScalingOptions o;
  o.ensemble = 16;
  const auto rep = scaling_exponent(t2.spec, NoiseModel::pure_dephasing(0.0, 0.0), {0.1}, o);
  EXPECT_LT(rep.points[0].d, 1e-12);
  EXPECT_LT(rep.points[0].averaging, 1e-12);
}
