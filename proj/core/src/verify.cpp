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

#include "modpulse/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modpulse/error.hpp"
#include "modpulse/noise_paths.hpp"
#include "modpulse/parallel.hpp"
#include "modpulse/rotation.hpp"
#include "modpulse/simulate.hpp"

namespace modpulse {

namespace {

// Per-group sums: 4 quaternion components then 9 rotation-matrix entries.
constexpr int kStride = 13;

struct GroupPlan {
  int turns = 1;
  int flips = 1;
  int size() const { return turns * flips; }
};

}  // namespace

double deviation_norm(const Su2& a) {
  const double dw = std::abs(a.w) - 1;
  return std::sqrt(dw * dw + a.x * a.x + a.y * a.y + a.z * a.z);
}

std::vector<double> geometric_scales(double lo, double hi, int count) {
  if (!(lo > 0) || !(hi > lo) || count < 2) throw SpecError("bad scale range");
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i) s[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  return s;
}

LineFit fit_log_slope(const std::vector<double>& lambda, const std::vector<double>& d,
                      const std::vector<double>& sigma_d) {
  const std::size_t n = lambda.size();
  if (n < 2 || d.size() != n || sigma_d.size() != n) throw DimensionMismatch("slope fit needs matching points");
  bool weighted = true;
  for (double s : sigma_d) weighted = weighted && s > 0;
  double sw = 0, sx = 0, sy = 0;
  std::vector<double> w(n), x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = std::log(lambda[i]);
    y[i] = std::log(d[i]);
    w[i] = weighted ? std::pow(d[i] / sigma_d[i], 2) : 1.0;
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xm = sx / sw, ym = sy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xm) * (x[i] - xm);
    sxy += w[i] * (x[i] - xm) * (y[i] - ym);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = ym - f.slope * xm;
  if (weighted) {
    f.slope_error = std::sqrt(1 / sxx);
  } else if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += std::pow(y[i] - f.intercept - f.slope * x[i], 2);
    f.slope_error = std::sqrt(ss / (n - 2) / sxx);
  }
  return f;
}

VerificationReport scaling_exponent(const PulseSpec& spec, const NoiseModel& noise,
                                    const std::vector<double>& scales, const ScalingOptions& opts) {
  noise.validate();
  if (scales.empty()) throw SpecError("no noise scales given");
  for (double s : scales)
    if (!(s > 0)) throw SpecError("noise scales must be positive");
  const bool ou = noise.tau_c > 0;
  const SlicedPropagator sim(spec, opts.slices > 0 ? opts.slices : default_slices(spec));
  const double ref = opts.reference_scale > 0 ? opts.reference_scale : *std::max_element(scales.begin(), scales.end());

  GroupPlan plan;
  if (opts.symmetrize) {
    plan.flips = 2;
    plan.turns = noise.s_x2 > 0 ? 4 : 1;
  }
  const std::size_t groups = std::max<std::size_t>(2, (opts.ensemble + plan.size() - 1) / plan.size());
  const std::size_t ns = scales.size();
  std::vector<double> tau(ns, 0);
  if (ou)
    for (std::size_t k = 0; k < ns; ++k)
      tau[k] = opts.correlation == CorrelationScaling::Physical ? noise.tau_c * ref / scales[k] : noise.tau_c;

  // sums[(g * ns + k) * kStride + c]: group means, reduced in index order below.
  std::vector<double> sums(groups * ns * kStride, 0);
  parallel_for(
      groups,
      [&](std::size_t g) {
        const std::uint64_t seed = path_seed(opts.seed, g);
        std::vector<NoiseRealization> base;
        if (!ou) base.push_back(sample_static(noise, seed));
        for (std::size_t k = 0; k < ns; ++k) {
          const NoiseRealization drawn = ou ? sample_ou(noise, sim.sample_times(), seed, tau[k]) : base[0];
          double* out = &sums[(g * ns + k) * kStride];
          for (int f = 0; f < plan.flips; ++f)
            for (int q = 0; q < plan.turns; ++q) {
              const NoiseRealization r = (q == 0 && f == 0) ? drawn : symmetry_image(drawn, noise, q, f == 1);
              const Su2 uc = sim.correction(r, scales[k]);
              const Mat3 rm = rotation_matrix(uc);
              out[0] += uc.w;
              out[1] += uc.x;
              out[2] += uc.y;
              out[3] += uc.z;
              for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) out[4 + 3 * i + j] += rm[i][j];
            }
          for (int c = 0; c < kStride; ++c) out[c] /= plan.size();
        }
      },
      opts.workers);

  VerificationReport rep;
  rep.realizations = groups * plan.size();
  std::vector<double> fl, fd, fs;
  for (std::size_t k = 0; k < ns; ++k) {
    std::array<double, kStride> mean{}, var{};
    for (std::size_t g = 0; g < groups; ++g)
      for (int c = 0; c < kStride; ++c) mean[c] += sums[(g * ns + k) * kStride + c];
    for (double& m : mean) m /= groups;
    for (std::size_t g = 0; g < groups; ++g)
      for (int c = 0; c < 4; ++c) var[c] += std::pow(sums[(g * ns + k) * kStride + c] - mean[c], 2);
    ScalePoint p;
    p.lambda = scales[k];
    p.tau_c = tau[k];
    p.average = {mean[0], mean[1], mean[2], mean[3]};
    p.d = deviation_norm(p.average);
    // Linearized error of d through its gradient in the four components.
    const double grad[4] = {std::copysign(std::abs(mean[0]) - 1, mean[0]), mean[1], mean[2], mean[3]};
    double s2 = 0;
    for (int c = 0; c < 4; ++c) {
      const double se2 = var[c] / (groups - 1) / groups;
      s2 += p.d > 0 ? std::pow(grad[c] / p.d, 2) * se2 : se2;
    }
    p.sigma_d = std::sqrt(s2);
    Mat3 avg{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) avg[i][j] = mean[4 + 3 * i + j] - (i == j ? 1 : 0);
    for (int j = 0; j < 3; ++j) p.averaging = std::max(p.averaging, norm(column(avg, j)));
    p.above_floor = p.d > 0 && p.d > opts.floor_sigmas * p.sigma_d;
    if (p.above_floor) {
      fl.push_back(p.lambda);
      fd.push_back(p.d);
      fs.push_back(p.sigma_d);
    } else {
      rep.noise_floor = true;
    }
    rep.points.push_back(p);
  }
  rep.fitted_points = fl.size();
  if (fl.size() >= 2) {
    const LineFit f = fit_log_slope(fl, fd, fs);
    rep.slope = f.slope;
    rep.slope_error = f.slope_error;
    rep.intercept = f.intercept;
  } else {
    rep.slope = std::nan("");
  }
  if (rep.noise_floor) {
    std::ostringstream m;
    m << (ns - fl.size()) << " of " << ns << " scales hit the Monte-Carlo floor";
    double worst = 0;
    for (const auto& p : rep.points) worst = std::max(worst, p.sigma_d);
    m << " (sigma_d up to " << worst << ")";
    rep.message = m.str();
  }
  return rep;
}

}  // namespace modpulse
