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

#include "modpulse/magnus.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "modpulse/error.hpp"

namespace modpulse {

namespace {

constexpr int K = gk61::kNodes;

// Column samples of D at the nodes of one panel: col[b][j][i] = D(t_i)[j][b].
struct PanelColumns {
  double col[3][3][K];

  PanelColumns(const RotationTrajectory& tr, int p) {
    const Su2* s = tr.states(p);
    for (int i = 0; i < K; ++i) {
      const Mat3 d = rotation_matrix(s[i]);
      for (int b = 0; b < 3; ++b)
        for (int j = 0; j < 3; ++j) col[b][j][i] = d[j][b];
    }
  }
};

void check_budget(double error, double target, const char* what) {
  if (error > target)
    throw QuadratureError(std::string(what) + " quadrature error estimate above target", error);
}

}  // namespace

ColumnIntegrals column_integrals(const RotationTrajectory& tr, bool second_order) {
  ColumnIntegrals out;
  out.has_second = second_order;
  double err1[3][3] = {}, err2[3][3][3] = {};
  Vec3 running[3] = {};  // int_0^{edge} c_g
  for (int p = 0; p < tr.panel_count(); ++p) {
    const double a = tr.panel_begin(p), b = tr.panel_end(p);
    const PanelColumns pc(tr, p);
    Vec3 panel_first[3];
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < 3; ++j) {
        const auto s = gk61::integrate(a, b, pc.col[c][j]);
        panel_first[c][j] = s.value;
        err1[c][j] += s.error;
      }
    if (second_order) {
      double cum[3][3][K];
      for (int g = 0; g < 3; ++g)
        for (int j = 0; j < 3; ++j) {
          gk61::cumulative(a, b, pc.col[g][j], cum[g][j]);
          for (int i = 0; i < K; ++i) cum[g][j][i] += running[g][j];
        }
      double f[K];
      for (int bb = 0; bb < 3; ++bb)
        for (int g = 0; g < 3; ++g)
          for (int j = 0; j < 3; ++j) {
            const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            for (int i = 0; i < K; ++i)
              f[i] = pc.col[bb][j1][i] * cum[g][j2][i] - pc.col[bb][j2][i] * cum[g][j1][i];
            const auto s = gk61::integrate(a, b, f);
            out.second[bb][g][j] += s.value;
            err2[bb][g][j] += s.error;
          }
    }
    for (int c = 0; c < 3; ++c) {
      out.first[c] += panel_first[c];
      running[c] += panel_first[c];
    }
  }
  for (int c = 0; c < 3; ++c)
    for (int j = 0; j < 3; ++j) {
      out.first_error = std::max(out.first_error, err1[c][j]);
      for (int g = 0; g < 3; ++g) out.second_error = std::max(out.second_error, err2[c][g][j]);
    }
  return out;
}

ThirdOrderTensor third_order_integrals(const RotationTrajectory& tr) {
  ThirdOrderTensor out{};
  Vec3 running_c[3] = {};
  double running_y[3][3][3][3] = {};  // [b][c][j][k]
  for (int p = 0; p < tr.panel_count(); ++p) {
    const double a = tr.panel_begin(p), b = tr.panel_end(p);
    const PanelColumns pc(tr, p);
    double cc[3][3][K];  // C_c(t)[k]
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) {
        gk61::cumulative(a, b, pc.col[c][k], cc[c][k]);
        for (int i = 0; i < K; ++i) cc[c][k][i] += running_c[c][k];
      }
    std::vector<double> y(3 * 3 * 3 * 3 * K);
    auto Y = [&y](int bb, int c, int j, int k) { return &y[((((bb * 3 + c) * 3 + j) * 3 + k)) * K]; };
    double prod[K];
    for (int bb = 0; bb < 3; ++bb)
      for (int c = 0; c < 3; ++c)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) {
            for (int i = 0; i < K; ++i) prod[i] = pc.col[bb][j][i] * cc[c][k][i];
            double* dst = Y(bb, c, j, k);
            gk61::cumulative(a, b, prod, dst);
            for (int i = 0; i < K; ++i) dst[i] += running_y[bb][c][j][k];
            running_y[bb][c][j][k] += gk61::integrate(a, b, prod).value;
          }
    double f[K];
    for (int aa = 0; aa < 3; ++aa)
      for (int bb = 0; bb < 3; ++bb)
        for (int c = 0; c < 3; ++c)
          for (int j = 0; j < 3; ++j) {
            for (int i = 0; i < K; ++i) {
              double s = 0, tr_y = 0;
              for (int k = 0; k < 3; ++k) {
                s += pc.col[aa][k][i] * (2 * Y(bb, c, j, k)[i] - Y(bb, c, k, j)[i]);
                tr_y += Y(bb, c, k, k)[i];
              }
              f[i] = s - pc.col[aa][j][i] * tr_y;
            }
            out[aa][bb][c][j] += gk61::integrate(a, b, f).value;
          }
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) running_c[c][k] += gk61::integrate(a, b, pc.col[c][k]).value;
  }
  for (auto& m : out)
    for (auto& r : m)
      for (auto& v : r) v = (2.0 / 3.0) * v;
  return out;
}

Vec3 cusp_integral(const RotationTrajectory& tr) {
  Vec3 out{}, running_c{}, running_m{};
  for (int p = 0; p < tr.panel_count(); ++p) {
    const double a = tr.panel_begin(p), b = tr.panel_end(p);
    const PanelColumns pc(tr, p);
    const double* t = tr.times(p);
    double cz[3][K], mz[3][K], tcz[K];
    for (int k = 0; k < 3; ++k) {
      gk61::cumulative(a, b, pc.col[2][k], cz[k]);
      for (int i = 0; i < K; ++i) tcz[i] = t[i] * pc.col[2][k][i];
      gk61::cumulative(a, b, tcz, mz[k]);
      for (int i = 0; i < K; ++i) {
        cz[k][i] += running_c[k];
        mz[k][i] += running_m[k];
      }
      running_m[k] += gk61::integrate(a, b, tcz).value;
    }
    double f[K];
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3, j2 = (j + 2) % 3;
      for (int i = 0; i < K; ++i) {
        const double w1 = t[i] * cz[j2][i] - mz[j2][i];
        const double w2 = t[i] * cz[j1][i] - mz[j1][i];
        f[i] = pc.col[2][j1][i] * w1 - pc.col[2][j2][i] * w2;
      }
      out[j] += gk61::integrate(a, b, f).value;
    }
    for (int k = 0; k < 3; ++k) running_c[k] += gk61::integrate(a, b, pc.col[2][k]).value;
  }
  return out;
}

namespace {

Vec3 magnus_normalized(int order, const RotationTrajectory& tr, const NoiseMoments& noise) {
  constexpr double target = 1e-12;
  constexpr int max_refinement = 4;
  if (order < 1 || order > 3) throw Error("Magnus order must be 1, 2 or 3");
  RotationTrajectory refined;
  const RotationTrajectory* cur = &tr;
  for (int level = 0;; ++level) {
    try {
      Vec3 out{};
      if (order <= 2) {
        const auto ci = column_integrals(*cur, order == 2);
        check_budget(order == 1 ? ci.first_error : ci.second_error, target, "Magnus");
        for (int b = 0; b < 3; ++b) {
          if (order == 1) out += noise.mean[b] * ci.first[b];
          else
            for (int g = 0; g < 3; ++g) out += noise.second[b][g] * ci.second[b][g];
        }
        return out;
      }
      const auto t3 = third_order_integrals(*cur);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 3; ++c) {
            const double m = noise.third(a, b, c);
            if (m != 0) out += m * t3[a][b][c];
          }
      if (noise.g1 != 0) out += noise.g1 * cusp_integral(*cur);
      return out;
    } catch (const QuadratureError&) {
      if (level >= max_refinement) throw;
      GridPolicy g = cur->grid();
      g.refinement += 1;
      refined = propagate(cur->spec(), g);
      cur = &refined;
    }
  }
}

}  // namespace

// Noise is given in physical units (1/time); the trajectory lives in units of
// tau_p, so an order-n term picks up tau_p^n.
Vec3 magnus_term(int order, const RotationTrajectory& tr, const NoiseMoments& noise) {
  return std::pow(tr.spec().duration, order) * magnus_normalized(order, tr, noise);
}

Vec3 magnus_term(int order, const RotationTrajectory& tr, const NoiseModel& noise) {
  return magnus_term(order, tr, NoiseMoments::from(noise));
}

}  // namespace modpulse
