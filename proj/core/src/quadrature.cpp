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

#include "modpulse/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "modpulse/error.hpp"

namespace modpulse {
namespace gk61 {
namespace {

using Real = long double;

// P_0..P_n at x by the three-term recurrence.
void legendre(Real x, int n, Real* p) {
  p[0] = 1;
  if (n > 0) p[1] = x;
  for (int k = 1; k < n; ++k)
    p[k + 1] = ((2 * k + 1) * x * p[k] - k * p[k - 1]) / (k + 1);
}

Rule build() {
  using GK = boost::math::quadrature::gauss_kronrod<Real, kNodes>;
  using G = boost::math::quadrature::gauss<Real, kNodes / 2>;
  const auto& xa = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  constexpr int h = kNodes / 2;

  std::array<Real, kNodes> x{};
  Rule r{};
  for (int i = 0; i <= h; ++i) {
    const Real g = (i % 2 == 1) ? wg[i / 2] : 0;
    x[h + i] = xa[i];
    x[h - i] = -xa[i];
    r.kronrod[h + i] = r.kronrod[h - i] = static_cast<double>(wk[i]);
    r.gauss[h + i] = r.gauss[h - i] = static_cast<double>(g);
  }
  for (int i = 0; i < kNodes; ++i) r.x[i] = static_cast<double>(x[i]);

  // Cumulative integration matrix S = Q V^{-1}, V_jk = P_k(x_j) and
  // Q_ik = int_{-1}^{x_i} P_k. Solve V^T S^T = Q^T in extended precision.
  std::vector<Real> vt(kNodes * kNodes), rhs(kNodes * kNodes);
  std::vector<Real> p(kNodes + 2);
  for (int j = 0; j < kNodes; ++j) {
    legendre(x[j], kNodes + 1, p.data());
    for (int k = 0; k < kNodes; ++k) vt[k * kNodes + j] = p[k];
    for (int k = 0; k < kNodes; ++k) {
      const Real q = k == 0 ? x[j] + 1 : (p[k + 1] - p[k - 1]) / (2 * k + 1);
      rhs[k * kNodes + j] = q;  // column j of Q^T
    }
  }
  for (int c = 0; c < kNodes; ++c) {
    int piv = c;
    for (int r2 = c + 1; r2 < kNodes; ++r2)
      if (std::fabs(vt[r2 * kNodes + c]) > std::fabs(vt[piv * kNodes + c])) piv = r2;
    if (piv != c) {
      for (int k = 0; k < kNodes; ++k) {
        std::swap(vt[c * kNodes + k], vt[piv * kNodes + k]);
        std::swap(rhs[c * kNodes + k], rhs[piv * kNodes + k]);
      }
    }
    for (int r2 = c + 1; r2 < kNodes; ++r2) {
      const Real m = vt[r2 * kNodes + c] / vt[c * kNodes + c];
      if (m == 0) continue;
      for (int k = c; k < kNodes; ++k) vt[r2 * kNodes + k] -= m * vt[c * kNodes + k];
      for (int k = 0; k < kNodes; ++k) rhs[r2 * kNodes + k] -= m * rhs[c * kNodes + k];
    }
  }
  for (int c = kNodes - 1; c >= 0; --c) {
    for (int k = 0; k < kNodes; ++k) {
      Real s = rhs[c * kNodes + k];
      for (int j = c + 1; j < kNodes; ++j) s -= vt[c * kNodes + j] * rhs[j * kNodes + k];
      rhs[c * kNodes + k] = s / vt[c * kNodes + c];
    }
  }
  // rhs now holds S^T: row j, column i -> S[i][j].
  for (int i = 0; i < kNodes; ++i)
    for (int j = 0; j < kNodes; ++j)
      r.cumulative[i][j] = static_cast<double>(rhs[j * kNodes + i]);
  return r;
}

}  // namespace

const Rule& rule() {
  static const Rule r = build();
  return r;
}

void nodes(double a, double b, double* t) {
  const Rule& r = rule();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < kNodes; ++i) t[i] = c + h * r.x[i];
}

PanelSum integrate(double a, double b, const double* f) {
  const Rule& r = rule();
  const double h = 0.5 * (b - a);
  double k = 0, g = 0;
  for (int i = 0; i < kNodes; ++i) {
    k += r.kronrod[i] * f[i];
    g += r.gauss[i] * f[i];
  }
  const double mean = 0.5 * k;
  double asc = 0, abs_sum = 0;
  for (int i = 0; i < kNodes; ++i) {
    asc += r.kronrod[i] * std::fabs(f[i] - mean);
    abs_sum += r.kronrod[i] * std::fabs(f[i]);
  }
  const double hh = std::fabs(h);
  double err = std::fabs((k - g) * h);
  asc *= hh;
  abs_sum *= hh;
  if (asc != 0 && err != 0) err = asc * std::min(1.0, std::pow(200 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50 * eps))
    err = std::max(50 * eps * abs_sum, err);
  return {k * h, err};
}

void cumulative(double a, double b, const double* f, double* out) {
  const Rule& r = rule();
  const double h = 0.5 * (b - a);
  for (int i = 0; i < kNodes; ++i) {
    double s = 0;
    const auto& row = r.cumulative[i];
    for (int j = 0; j < kNodes; ++j) s += row[j] * f[j];
    out[i] = h * s;
  }
}

}  // namespace gk61

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b,
                                    const QuadraturePolicy& policy) {
  struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  auto eval = [&](double lo, double hi) {
    double t[gk61::kNodes], y[gk61::kNodes];
    gk61::nodes(lo, hi, t);
    for (int i = 0; i < gk61::kNodes; ++i) {
      y[i] = f(t[i]);
      if (!std::isfinite(y[i]))
        throw QuadratureError("integrand is not finite at t = " + std::to_string(t[i]),
                              std::numeric_limits<double>::infinity());
    }
    const auto s = gk61::integrate(lo, hi, y);
    return Piece{lo, hi, s.value, s.error};
  };

  QuadratureResult out;
  if (a == b) return out;
  std::priority_queue<Piece> heap;
  Piece first = eval(a, b);
  double value = first.value, error = first.error;
  heap.push(first);
  int count = 1;
  auto target = [&] { return std::max(policy.abs_tol, policy.rel_tol * std::fabs(value)); };
  while (error > target()) {
    if (count >= policy.max_subdivisions) {
      throw QuadratureError("adaptive quadrature did not reach the error target after " +
                                std::to_string(count) + " subintervals",
                            error);
    }
    const Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("subinterval width reached floating-point resolution", error);
    }
    const Piece l = eval(worst.a, mid), r = eval(mid, worst.b);
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
    heap.push(l);
    heap.push(r);
    ++count;
  }
  // Re-sum to shed the accumulated update rounding.
  value = 0;
  error = 0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error = error;
  out.intervals = count;
  return out;
}

}  // namespace modpulse
