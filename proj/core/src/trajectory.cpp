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

#include "modpulse/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "modpulse/error.hpp"

namespace modpulse {

namespace {

using State = std::array<double, 4>;

// Quaternion form of i dP/dt = (v.sigma) P with P = w - i q.sigma.
inline State rotation_rhs(const Vec3& v, const State& y) {
  const double w = y[0], x = y[1], yy = y[2], z = y[3];
  return {-(v[0] * x + v[1] * yy + v[2] * z), w * v[0] + v[1] * z - v[2] * yy,
          w * v[1] + v[2] * x - v[0] * z, w * v[2] + v[0] * yy - v[1] * x};
}

struct FmDrive {
  std::vector<FmPhase> phases;
  std::vector<FmSpec> segs;

  explicit FmDrive(const PulseSpec& spec) {
    if (const auto* f = std::get_if<FmSpec>(&spec.shape)) {
      segs.push_back(*f);
    } else {
      segs = std::get<FmSequenceSpec>(spec.shape).segments;
    }
    for (const auto& s : segs) phases.emplace_back(s);
  }
  Vec3 operator()(double t) const {
    const int k = std::clamp(static_cast<int>(std::floor(t)), 0, static_cast<int>(segs.size()) - 1);
    const double u = t - k;
    const double om = phases[k](u);
    const double v = segs[k].amplitude * envelope(u, segs[k].switching_time);
    return {v * std::cos(om), v * std::sin(om), 0};
  }
};

Su2 am_state(const PulseSpec& spec, double t) {
  const double psi = am_angle(spec, t);
  return {std::cos(psi / 2), 0, std::sin(psi / 2), 0};
}

Su2 to_su2(const State& y) { return {y[0], y[1], y[2], y[3]}; }

}  // namespace

std::vector<double> panel_edges(const PulseSpec& spec, const GridPolicy& grid) {
  const auto bp = breakpoints(spec);
  double width = grid.max_panel_width;
  if (!(width > 0)) width = std::min(0.125, grid.panel_phase / std::max(rate_bound(spec), 1.0));
  width = std::ldexp(width, -grid.refinement);
  std::vector<double> edges{bp.front()};
  for (std::size_t k = 1; k < bp.size(); ++k) {
    const double a = bp[k - 1], b = bp[k];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-9)));
    for (int i = 1; i < n; ++i) edges.push_back(a + (b - a) * i / n);
    edges.push_back(b);
  }
  return edges;
}

RotationTrajectory propagate(const PulseSpec& spec, const GridPolicy& grid) {
  validate(spec);
  RotationTrajectory tr;
  tr.spec_ = spec;
  tr.grid_ = grid;
  tr.edges_ = panel_edges(spec, grid);
  const int panels = tr.panel_count();
  constexpr int K = gk61::kNodes;
  tr.times_.resize(static_cast<std::size_t>(panels) * K);
  tr.states_.resize(tr.times_.size());
  for (int p = 0; p < panels; ++p) gk61::nodes(tr.edges_[p], tr.edges_[p + 1], &tr.times_[p * K]);

  const Family fam = spec.family();
  if (fam == Family::AmPiecewise || fam == Family::AmContinuous) {
    tr.closed_form_ = true;
    tr.initial_axis_ = Axis(0, 1, 0);
    for (std::size_t i = 0; i < tr.times_.size(); ++i) tr.states_[i] = am_state(spec, tr.times_[i]);
    tr.final_ = am_state(spec, 1.0);
    return tr;
  }

  const FmDrive drive(spec);
  const Vec3 v0 = drive(0.0);
  // With a transient the drive vanishes at t = 0; its direction is still set
  // by the phase.
  const double om0 = drive.phases[0](0.0);
  tr.initial_axis_ = norm(v0) > 0 ? Axis(v0) : Axis(std::cos(om0), std::sin(om0), 0);

  // Stops: every node plus every panel edge, in order. Each node index maps
  // back into states_; edges map to -1 (the last edge is the final state).
  std::vector<double> stops;
  std::vector<long> where;
  stops.reserve(tr.times_.size() + panels + 1);
  for (int p = 0; p < panels; ++p) {
    stops.push_back(tr.edges_[p]);
    where.push_back(-1);
    for (int i = 0; i < K; ++i) {
      stops.push_back(tr.times_[p * K + i]);
      where.push_back(static_cast<long>(p) * K + i);
    }
  }
  stops.push_back(tr.edges_.back());
  where.push_back(-2);

  State y{1, 0, 0, 0};
  auto rhs = [&drive](double t, const State& s) { return rotation_rhs(drive(t), s); };
  auto post = [](State& s) {
    const double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2] + s[3] * s[3]);
    for (double& c : s) c /= n;
  };
  auto on_step = [&](double t0, const State& y0, const State& f0, double t1, const State& y1,
                     const State& f1) {
    if (grid.dense) tr.dense_.push_back({t0, t1, y0, f0, y1, f1});
  };
  auto on_stop = [&](std::size_t k, double, const State& s) {
    if (where[k] >= 0) tr.states_[where[k]] = to_su2(s);
    if (where[k] == -2) tr.final_ = to_su2(s);
  };
  tr.stats_ = integrate_rk4_doubling<4>(rhs, y, 0.0, stops, grid.ode, post, on_step, on_stop);
  return tr;
}

Su2 RotationTrajectory::propagator_at(double t) const {
  if (!(t >= 0 && t <= length())) throw SpecError("time outside the trajectory");
  if (closed_form_) return am_state(spec_, t);
  if (dense_.empty()) throw Error("trajectory was propagated without dense output");
  auto it = std::lower_bound(dense_.begin(), dense_.end(), t,
                             [](const DenseStep& d, double x) { return d.t1 < x; });
  if (it == dense_.end()) --it;
  const double h = it->t1 - it->t0;
  const double s = (t - it->t0) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  State y;
  for (int i = 0; i < 4; ++i)
    y[i] = h00 * it->y0[i] + h10 * h * it->f0[i] + h01 * it->y1[i] + h11 * h * it->f1[i];
  Su2 q = to_su2(y);
  q.normalize();
  return q;
}

RotationState RotationTrajectory::state_at(double t) const {
  return RotationState::from_su2(propagator_at(t), initial_axis_);
}

RotationState RotationTrajectory::final_rotation() const {
  return RotationState::from_su2(final_, initial_axis_);
}

SphericalRates derivatives_spherical(const RotationState& st, double omega, double amplitude) {
  const double sh = std::sin(st.psi / 2), ch = std::cos(st.psi / 2);
  const double th = st.theta(), ph = st.phi();
  const double st_ = std::sin(th), ct = std::cos(th);
  if (std::fabs(sh) < 1e-12) throw ChartSingularity("psi is a multiple of 2 pi");
  if (std::fabs(st_) < 1e-12) throw ChartSingularity("theta is a multiple of pi");
  const double d = omega - ph;
  SphericalRates r;
  r.dpsi = 2 * amplitude * st_ * (std::sin(omega) * std::sin(ph) + std::cos(omega) * std::cos(ph));
  r.dphi = amplitude * (ch * std::sin(d) - sh * ct * std::cos(d)) / (sh * st_);
  r.dtheta = amplitude * (ch * ct * std::cos(d) + sh * std::sin(d)) / sh;
  return r;
}

}  // namespace modpulse
