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

#include "modpulse/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "modpulse/error.hpp"

namespace modpulse {

namespace {

constexpr double kPi = std::numbers::pi;
using cplx = std::complex<double>;

bool is_am(Family f) { return f == Family::AmPiecewise || f == Family::AmContinuous; }

bool multiple_of_two_pi(double angle) {
  const double r = std::remainder(angle, 2 * kPi);
  return std::fabs(r) < 1e-12;
}

// (x - sin x) / x^2, stable near zero.
double segment_kernel(double x) {
  if (std::fabs(x) < 1e-3) {
    const double x2 = x * x;
    return x / 6 - x * x2 / 120 + x * x2 * x2 / 5040;
  }
  return (x - std::sin(x)) / (x * x);
}

ResidualVector am_closed_form(const PiecewiseAmSpec& p, double target, int order) {
  cplx total = 0;
  double inner = 0, psi = 0, prev = 0;
  for (std::size_t k = 0; k <= p.instants.size(); ++k) {
    const double end = k < p.instants.size() ? p.instants[k] : 1.0;
    const double len = end - prev;
    const double w = 2 * p.signs[k] * p.amplitude;
    const cplx start = std::polar(1.0, psi);
    const double x = w * len;
    // int_0^len e^{i(psi + w t)} dt
    cplx e;
    if (std::fabs(x) < 1e-8) {
      e = start * len * cplx(1 - x * x / 6, x / 2);
    } else {
      e = start * (std::polar(1.0, x) - 1.0) / cplx(0, w);
    }
    // Within one segment sin(psi1 - psi2) = sin(w (t1 - t2)).
    inner += len * len * segment_kernel(x) + std::imag(e * std::conj(total));
    total += e;
    psi += x;
    prev = end;
  }
  ResidualVector r;
  r.add("mu1_1", total.imag());
  r.add("mu1_2", total.real());
  r.add("angle", psi - target);
  if (order >= 2) r.add("mu2", inner);
  return r;
}

// Sum of adaptive integrals over [a, b] split at the interior breakpoints.
QuadratureResult integrate_split(const std::function<double(double)>& f, double a, double b,
                                 const std::vector<double>& breaks, const QuadraturePolicy& pol) {
  QuadratureResult total;
  double lo = a;
  auto piece = [&](double hi) {
    if (hi > lo) {
      const auto r = integrate_adaptive(f, lo, hi, pol);
      total.value += r.value;
      total.error += r.error;
      total.intervals += r.intervals;
    }
    lo = hi;
  };
  for (double t : breaks)
    if (t > a && t < b) piece(t);
  piece(b);
  return total;
}

ResidualVector am_quadrature(const PulseSpec& spec, int order, const QuadraturePolicy& pol) {
  const auto bp = breakpoints(spec);
  auto psi = [&spec](double t) { return am_angle(spec, t); };
  const auto s = integrate_split([&](double t) { return std::sin(psi(t)); }, 0, 1, bp, pol);
  const auto c = integrate_split([&](double t) { return std::cos(psi(t)); }, 0, 1, bp, pol);
  ResidualVector r;
  r.add("mu1_1", s.value, s.error);
  r.add("mu1_2", c.value, c.error);
  r.add("angle", total_angle_am(spec) - spec.target.radians);
  if (order >= 2) {
    // Nested: the inner cumulative integrals are evaluated once per outer
    // abscissa and shared by both terms of sin(psi1 - psi2).
    QuadraturePolicy inner_pol = pol;
    inner_pol.abs_tol = pol.abs_tol / 10;
    auto outer = [&](double t1) {
      const double p1 = psi(t1);
      const double cs = integrate_split([&](double t) { return std::cos(psi(t)); }, 0, t1, bp, inner_pol).value;
      const double sn = integrate_split([&](double t) { return std::sin(psi(t)); }, 0, t1, bp, inner_pol).value;
      return std::sin(p1) * cs - std::cos(p1) * sn;
    };
    const auto m = integrate_split(outer, 0, 1, bp, pol);
    r.add("mu2", m.value, m.error);
  }
  return r;
}

double final_tilt(const RotationTrajectory& tr) {
  return tr.final_rotation().theta() - kPi / 2;
}

}  // namespace

void ResidualVector::add(std::string name, double value, double error) {
  entries_.push_back({std::move(name), value, error});
}

void ResidualVector::append(const ResidualVector& other) {
  entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
}

const NamedResidual& ResidualVector::at(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e;
  throw Error("no residual named " + name);
}

bool ResidualVector::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const auto& e) { return e.name == name; });
}

std::vector<double> ResidualVector::values() const {
  std::vector<double> v;
  v.reserve(entries_.size());
  for (const auto& e : entries_) v.push_back(e.value);
  return v;
}

double ResidualVector::residue() const {
  double s = 0;
  for (const auto& e : entries_) s += std::fabs(e.value);
  return s;
}

double ResidualVector::max_abs() const {
  double s = 0;
  for (const auto& e : entries_) s = std::max(s, std::fabs(e.value));
  return s;
}

ResidualVector residual_am_dephasing(const PulseSpec& spec, int order, const QuadraturePolicy& policy,
                                     AmMethod method) {
  validate(spec);
  if (!is_am(spec.family())) throw SpecError("AM residuals need a fixed-axis pulse");
  if (order != 1 && order != 2) throw SpecError("AM conditions exist for orders 1 and 2");
  const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape);
  const bool closed = p && method != AmMethod::Quadrature;
  if (method == AmMethod::ClosedForm && !p) throw SpecError("closed form needs a piecewise pulse");
  return closed ? am_closed_form(*p, spec.target.radians, order) : am_quadrature(spec, order, policy);
}

ResidualVector residual_fm_first(const RotationTrajectory& tr) {
  const auto ci = column_integrals(tr, false);
  ResidualVector r;
  for (int j = 0; j < 3; ++j) r.add("mu1_" + std::to_string(j + 1), ci.first[2][j], ci.first_error);
  return r;
}

ResidualVector residual_fm_second_dephasing(const RotationTrajectory& tr) {
  const auto ci = column_integrals(tr, true);
  ResidualVector r;
  for (int j = 0; j < 3; ++j) r.add("mu2_" + std::to_string(j + 1), ci.second[2][2][j], ci.second_error);
  return r;
}

ResidualVector residual_general_second(const RotationTrajectory& tr) {
  const auto ci = column_integrals(tr, true);
  ResidualVector r;
  for (int j = 0; j < 3; ++j)
    r.add("mu2_" + std::to_string(j + 1), ci.second[0][0][j] + ci.second[1][1][j], 2 * ci.second_error);
  for (int j = 0; j < 3; ++j) r.add("mu2_" + std::to_string(j + 4), ci.second[2][2][j], ci.second_error);
  return r;
}

ResidualVector boundary_residuals(const RotationTrajectory& tr, double target) {
  ResidualVector r;
  r.add("angle", tr.final_rotation().psi - target);
  if (!multiple_of_two_pi(target)) r.add("tilt", final_tilt(tr));
  return r;
}

ResidualVector evaluate_residuals(const PulseSpec& spec, int order, const NoiseModel& noise,
                                  const EvalOptions& options) {
  noise.validate();
  validate(spec);
  if (order != 1 && order != 2) throw SpecError("residual systems exist for orders 1 and 2");
  const bool general = !noise.pure_dephasing_only();
  if (is_am(spec.family())) {
    if (general) throw SpecError("fixed-axis pulses cannot cancel transverse noise");
    return residual_am_dephasing(spec, order, options.quad);
  }
  GridPolicy grid = options.grid;
  for (int level = 0;; ++level) {
    const RotationTrajectory tr = propagate(spec, grid);
    const auto ci = column_integrals(tr, order >= 2);
    const double err = std::max(ci.first_error, order >= 2 ? 2 * ci.second_error : 0.0);
    if (err > options.quad.abs_tol) {
      if (level >= options.max_refinement)
        throw QuadratureError("residual quadrature did not converge", err);
      grid.refinement += 1;
      continue;
    }
    ResidualVector r;
    for (int j = 0; j < 3; ++j) r.add("mu1_" + std::to_string(j + 1), ci.first[2][j], ci.first_error);
    if (order >= 2) {
      if (general) {
        for (int j = 0; j < 3; ++j)
          r.add("mu2_" + std::to_string(j + 1), ci.second[0][0][j] + ci.second[1][1][j],
                2 * ci.second_error);
        for (int j = 0; j < 3; ++j)
          r.add("mu2_" + std::to_string(j + 4), ci.second[2][2][j], ci.second_error);
      } else {
        for (int j = 0; j < 3; ++j)
          r.add("mu2_" + std::to_string(j + 1), ci.second[2][2][j], ci.second_error);
      }
    }
    r.append(boundary_residuals(tr, spec.target.radians));
    return r;
  }
}

ResidualSystem::ResidualSystem(SystemRequest request) : req_(std::move(request)) {
  const PulseSpec& a = req_.ansatz;
  validate(a);
  req_.noise.validate();
  const Family fam = a.family();
  const bool general = !req_.noise.pure_dephasing_only();
  const int order = req_.order;
  if (order != 1 && order != 2) throw SpecError("residual systems exist for orders 1 and 2");
  if (is_am(fam) && general) throw SpecError("fixed-axis pulses cannot cancel transverse noise");
  if (fam == Family::FmSequence) throw SpecError("composite sequences are built, not solved");
  if (req_.symmetric && general)
    throw SpecError("symmetric ansatz is offered for pure dephasing only");

  if (const auto* p = std::get_if<PiecewiseAmSpec>(&a.shape)) {
    const std::size_t n = p->instants.size();
    if (req_.symmetric && n % 2) throw SpecError("symmetric piecewise ansatz needs an even instant count");
    const std::size_t free_instants = req_.symmetric ? n / 2 : n;
    for (std::size_t k = 0; k < free_instants; ++k) params_.push_back("tau_" + std::to_string(k + 1));
    params_.push_back("v0");
    active_ = req_.symmetric ? std::vector<std::string>{"mu1_1", "angle"}
                             : std::vector<std::string>{"mu1_1", "mu1_2", "angle"};
    if (order == 2) active_.push_back("mu2");
  } else if (std::holds_alternative<ContinuousAmSpec>(a.shape)) {
    // psi(1) = theta holds identically and int cos psi follows from int sin psi
    // for the mirror-symmetric cosine series.
    params_ = {"a", "b"};
    active_ = {"mu1_1"};
    if (order == 2) active_.push_back("mu2");
  } else {
    const auto& fm = std::get<FmSpec>(a.shape);
    params_.push_back("V0");
    for (const auto& c : fm.coefficients) {
      if (req_.symmetric && c.index % 2) continue;
      params_.push_back("b" + std::to_string(c.index));
      coeff_index_.push_back(c.index);
    }
    active_ = {"mu1_1", "mu1_2", "mu1_3"};
    if (order == 2) {
      const int n2 = general ? 6 : 3;
      for (int j = 1; j <= n2; ++j) active_.push_back("mu2_" + std::to_string(j));
    }
    active_.push_back("angle");
    active_.push_back("tilt");
    // Mirror-symmetric phases fix the final axis in the xy-plane, confine the
    // first-order vector to a line and the second-order one to a plane.
    if (req_.symmetric) automatic_ = order == 2 ? 4 : 3;
  }
  if (params_.size() < independent_residuals())
    throw DimensionMismatch("ansatz has " + std::to_string(params_.size()) +
                            " free parameters but the conditions need " +
                            std::to_string(independent_residuals()));
}

PulseSpec ResidualSystem::spec_for(std::span<const double> x) const {
  if (x.size() != params_.size()) throw DimensionMismatch("parameter vector has the wrong length");
  PulseSpec s = req_.ansatz;
  s.printed_decimals = 0;
  if (auto* p = std::get_if<PiecewiseAmSpec>(&s.shape)) {
    const std::size_t n = p->instants.size();
    if (req_.symmetric) {
      for (std::size_t k = 0; k < n / 2; ++k) {
        p->instants[k] = x[k];
        p->instants[n - 1 - k] = 1 - x[k];
      }
    } else {
      for (std::size_t k = 0; k < n; ++k) p->instants[k] = x[k];
    }
    p->amplitude = x.back();
  } else if (auto* c = std::get_if<ContinuousAmSpec>(&s.shape)) {
    c->a = x[0];
    c->b = x[1];
  } else {
    auto& fm = std::get<FmSpec>(s.shape);
    fm.amplitude = x[0];
    for (auto& c : fm.coefficients) {
      const auto it = std::find(coeff_index_.begin(), coeff_index_.end(), c.index);
      c.value = it == coeff_index_.end() ? 0.0 : x[1 + (it - coeff_index_.begin())];
    }
  }
  return s;
}

std::vector<double> ResidualSystem::parameters_of(const PulseSpec& spec) const {
  std::vector<double> x;
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) {
    const std::size_t n = p->instants.size();
    const std::size_t m = req_.symmetric ? n / 2 : n;
    for (std::size_t k = 0; k < m; ++k) x.push_back(p->instants[k]);
    x.push_back(p->amplitude);
  } else if (const auto* c = std::get_if<ContinuousAmSpec>(&spec.shape)) {
    x = {c->a, c->b};
  } else if (const auto* fm = std::get_if<FmSpec>(&spec.shape)) {
    x.push_back(fm->amplitude);
    for (int idx : coeff_index_) x.push_back(fm->coefficient(idx));
  } else {
    throw SpecError("spec does not match the system family");
  }
  if (x.size() != params_.size()) throw DimensionMismatch("spec does not match the ansatz layout");
  return x;
}

ResidualVector ResidualSystem::evaluate(std::span<const double> x) const {
  const PulseSpec s = spec_for(x);
  // Out-of-order instants make the pulse invalid; report a large residual so
  // solvers back off instead of aborting. Runaway Fourier steps get the same
  // treatment; they are also what makes an evaluation expensive.
  try {
    validate(s);
    if (req_.max_rate > 0 && rate_bound(s) > req_.max_rate) throw SpecError("rate bound exceeded");
  } catch (const SpecError&) {
    ResidualVector r;
    for (const auto& n : active_) r.add(n, 1e3);
    return r;
  }
  return evaluate_residuals(s, req_.order, req_.noise, req_.eval);
}

std::vector<double> ResidualSystem::operator()(std::span<const double> x) const {
  const ResidualVector full = evaluate(x);
  std::vector<double> out;
  out.reserve(active_.size());
  for (const auto& n : active_) out.push_back(full.at(n).value);
  return out;
}

double ResidualSystem::amplitude(std::span<const double> x) const { return peak_amplitude(spec_for(x)); }

int ResidualSystem::parameter_index(const std::string& name) const {
  const auto it = std::find(params_.begin(), params_.end(), name);
  return it == params_.end() ? -1 : static_cast<int>(it - params_.begin());
}

ResidualSystem assemble_system(const SystemRequest& request) { return ResidualSystem(request); }

double sensitivity_tolerance(const PulseSpec& spec, int order, const NoiseModel& noise,
                             const EvalOptions& options) {
  if (spec.printed_decimals <= 0) return kFullPrecisionTolerance;
  const double unit = std::pow(10.0, -spec.printed_decimals);
  const ResidualVector base = evaluate_residuals(spec, order, noise, options);
  double worst = 0;
  auto probe = [&](PulseSpec s) {
    const ResidualVector r = evaluate_residuals(s, order, noise, options);
    for (std::size_t i = 0; i < r.size(); ++i)
      worst = std::max(worst, std::fabs(r[i].value - base[i].value));
  };
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) {
    for (std::size_t k = 0; k < p->instants.size(); ++k) {
      PulseSpec s = spec;
      std::get<PiecewiseAmSpec>(s.shape).instants[k] += unit;
      probe(s);
    }
    PulseSpec s = spec;
    std::get<PiecewiseAmSpec>(s.shape).amplitude += unit;
    probe(s);
  } else if (std::holds_alternative<ContinuousAmSpec>(spec.shape)) {
    PulseSpec s = spec;
    std::get<ContinuousAmSpec>(s.shape).a += unit;
    probe(s);
    s = spec;
    std::get<ContinuousAmSpec>(s.shape).b += unit;
    probe(s);
  } else if (std::holds_alternative<FmSpec>(spec.shape)) {
    PulseSpec s = spec;
    std::get<FmSpec>(s.shape).amplitude += unit;
    probe(s);
    const auto& fm = std::get<FmSpec>(spec.shape);
    for (std::size_t k = 0; k < fm.coefficients.size(); ++k) {
      if (fm.coefficients[k].value == 0) continue;
      s = spec;
      std::get<FmSpec>(s.shape).coefficients[k].value += unit;
      probe(s);
    }
  } else {
    throw SpecError("sensitivity tolerance is defined for published single pulses");
  }
  return 5 * worst;
}

bool CheckReport::passed() const {
  for (const auto& e : residuals.entries())
    if (!(std::fabs(e.value) <= tolerance)) return false;
  return true;
}

CheckReport check_spec(const PulseSpec& spec, int order, const NoiseModel& noise, double tolerance,
                       const EvalOptions& options) {
  CheckReport r;
  r.residuals = evaluate_residuals(spec, order, noise, options);
  r.tolerance = tolerance;
  r.order = order;
  r.noise = noise;
  return r;
}

}  // namespace modpulse
