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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "modpulse/error.hpp"

namespace modpulse {

struct OdeTolerance {
  double local_abs = 1e-15;  // per-step absolute error target
  double h_init = 1e-3;
  double h_min = 1e-13;
  double h_max = 0.05;
  long max_steps = 20'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_calls = 0;
};

// Classical RK4 with step doubling. The step is clipped to land exactly on
// every entry of `stops` (ascending). `post` may project the state after each
// accepted step (renormalization); `on_step(t0, y0, f0, t1, y1, f1)` sees
// every accepted step and `on_stop(k, t, y)` every stop.
template <std::size_t N, class Rhs, class Post, class OnStep, class OnStop>
OdeStats integrate_rk4_doubling(Rhs&& rhs, std::array<double, N>& y, double t,
                                std::span<const double> stops, const OdeTolerance& tol,
                                Post&& post, OnStep&& on_step, OnStop&& on_stop) {
  using State = std::array<double, N>;
  OdeStats stats;
  auto axpy = [](const State& a, double s, const State& b) {
    State r;
    for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  // One RK4 step from (t0, y0) with known slope f0.
  auto rk4 = [&](double t0, const State& y0, const State& f0, double h) {
    const State k2 = rhs(t0 + 0.5 * h, axpy(y0, 0.5 * h, f0));
    const State k3 = rhs(t0 + 0.5 * h, axpy(y0, 0.5 * h, k2));
    const State k4 = rhs(t0 + h, axpy(y0, h, k3));
    stats.rhs_calls += 3;
    State r;
    for (std::size_t i = 0; i < N; ++i)
      r[i] = y0[i] + h / 6 * (f0[i] + 2 * (k2[i] + k3[i]) + k4[i]);
    return r;
  };

  State f = rhs(t, y);
  ++stats.rhs_calls;
  double h = std::min(tol.h_init, tol.h_max);
  std::size_t next = 0;
  while (next < stops.size()) {
    const double target = stops[next];
    if (target <= t) {
      on_stop(next, t, y);
      ++next;
      continue;
    }
    double hs = h;
    bool clipped = false;
    if (t + hs >= target || target - (t + hs) < 1e-3 * hs) {
      hs = target - t;
      clipped = true;
    }
    const State full = rk4(t, y, f, hs);
    const State half = rk4(t, y, f, 0.5 * hs);
    const State fh = rhs(t + 0.5 * hs, half);
    ++stats.rhs_calls;
    State two = rk4(t + 0.5 * hs, half, fh, 0.5 * hs);
    double err = 0;
    for (std::size_t i = 0; i < N; ++i) err = std::max(err, std::fabs(two[i] - full[i]) / 15);
    const double factor =
        err == 0 ? 5.0 : std::clamp(0.9 * std::pow(tol.local_abs / err, 0.2), 0.2, 5.0);
    if (err <= tol.local_abs) {
      const double t1 = clipped ? target : t + hs;
      post(two);
      const State f1 = rhs(t1, two);
      ++stats.rhs_calls;
      on_step(t, y, f, t1, two, f1);
      t = t1;
      y = two;
      f = f1;
      ++stats.accepted;
      if (!clipped) h = std::min(hs * factor, tol.h_max);
    } else {
      ++stats.rejected;
      h = hs * factor;
      if (h < tol.h_min)
        throw IntegratorError("step size underflow at t = " + std::to_string(t), t);
    }
    if (stats.accepted + stats.rejected > tol.max_steps)
      throw IntegratorError("step budget exhausted at t = " + std::to_string(t), t);
  }
  return stats;
}

}  // namespace modpulse
