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

#include "modpulse/error.hpp"
#include "modpulse/quadrature.hpp"

using namespace modpulse;

TEST(Quadrature, KronrodRuleIsExactForHighDegreePolynomials) {
  // The 61-point Kronrod rule integrates degree 91 exactly.
  double t[gk61::kNodes], f[gk61::kNodes];
  gk61::nodes(-1, 1, t);
  for (int deg : {0, 2, 10, 40, 90}) {
    for (int i = 0; i < gk61::kNodes; ++i) f[i] = std::pow(t[i], deg);
    const auto s = gk61::integrate(-1, 1, f);
    EXPECT_NEAR(s.value, 2.0 / (deg + 1), 1e-14) << deg;
  }
}

TEST(Quadrature, WeightsSumToIntervalLength) {
  const auto& r = gk61::rule();
  double k = 0, g = 0;
  for (int i = 0; i < gk61::kNodes; ++i) {
    k += r.kronrod[i];
    g += r.gauss[i];
  }
  EXPECT_NEAR(k, 2, 1e-14);
  EXPECT_NEAR(g, 2, 1e-14);
}

TEST(Quadrature, CumulativeMatrixIntegratesPolynomials) {
  double t[gk61::kNodes], f[gk61::kNodes], out[gk61::kNodes];
  gk61::nodes(0.5, 2.0, t);
  for (int i = 0; i < gk61::kNodes; ++i) f[i] = 3 * t[i] * t[i] - std::pow(t[i], 7);
  gk61::cumulative(0.5, 2.0, f, out);
  const auto prim = [](double x) { return x * x * x - std::pow(x, 8) / 8; };
  for (int i = 0; i < gk61::kNodes; ++i) EXPECT_NEAR(out[i], prim(t[i]) - prim(0.5), 1e-12);
}

TEST(Quadrature, AdaptiveMatchesAnalyticIntegrals) {
  const auto r1 = integrate_adaptive([](double x) { return std::sin(50 * x) * std::exp(-x); }, 0, 3);
  const double ref1 = (std::exp(-3.0) * (-std::sin(150.0) - 50 * std::cos(150.0)) + 50) / 2501;
  EXPECT_NEAR(r1.value, ref1, 1e-12);
  const auto r2 = integrate_adaptive([](double x) { return std::sqrt(x); }, 0, 1);
  EXPECT_NEAR(r2.value, 2.0 / 3, 1e-12);
  EXPECT_LE(r2.error, 1e-12);
}

TEST(Quadrature, ThrowsWhenSubdivisionCapIsHit) {
  QuadraturePolicy p;
  p.max_subdivisions = 3;
  p.abs_tol = 1e-15;
  try {
    integrate_adaptive([](double x) { return std::sin(1 / (x + 1e-3)); }, 0, 1, p);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_GT(e.estimate(), 0);
  }
}

TEST(Quadrature, RejectsNonFiniteIntegrand) {
  EXPECT_THROW(integrate_adaptive([](double x) { return 1 / (x - 0.5) / 0.0; }, 0, 1), QuadratureError);
}
