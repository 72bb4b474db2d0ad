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

#include "modpulse/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <regex>

#include "modpulse/error.hpp"

namespace modpulse {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Segment of a sequence containing t, and the local time within it.
const FmSpec& segment_at(const FmSequenceSpec& s, double t, double* local) {
  const int n = static_cast<int>(s.segments.size());
  int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
  *local = t - k;
  return s.segments[k];
}

ControlSample fm_sample(const FmSpec& fm, double t) {
  ControlSample c;
  c.t = t;
  c.omega = FmPhase(fm)(t);
  c.envelope = envelope(t, fm.switching_time);
  const double v = fm.amplitude * c.envelope;
  c.v = {v * std::cos(c.omega), v * std::sin(c.omega), 0};
  return c;
}

}  // namespace

TargetAngle TargetAngle::parse(const std::string& raw) {
  const std::string text = trim(raw);
  static const std::regex symbolic(R"(^([+-]?)(\d*)\s*\*?\s*pi\s*(?:/\s*(\d+))?$)");
  std::smatch m;
  TargetAngle a;
  if (std::regex_match(text, m, symbolic)) {
    const double num = m[2].str().empty() ? 1.0 : std::stod(m[2].str());
    const double den = m[3].str().empty() ? 1.0 : std::stod(m[3].str());
    if (den == 0) throw SpecError("angle has zero denominator: " + text);
    a.radians = (m[1].str() == "-" ? -1 : 1) * num * kPi / den;
    a.token = m[1].str() == "-" ? "-" : "";
    if (num != 1) a.token += m[2].str();
    a.token += "pi";
    if (den != 1) a.token += "/" + m[3].str();
    return a;
  }
  try {
    std::size_t used = 0;
    a.radians = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw SpecError("cannot read angle '" + text + "' (use pi, pi/2 or a number)");
  }
  a.token = text;
  return a;
}

TargetAngle TargetAngle::pi() { return {kPi, "pi"}; }
TargetAngle TargetAngle::half_pi() { return {kPi / 2, "pi/2"}; }

const char* family_name(Family f) {
  switch (f) {
    case Family::AmPiecewise: return "am-piecewise";
    case Family::AmContinuous: return "am-continuous";
    case Family::Fm: return "fm";
    case Family::AmFm: return "amfm";
    case Family::FmSequence: return "fm-sequence";
  }
  return "?";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::AmPiecewise, Family::AmContinuous, Family::Fm, Family::AmFm,
                   Family::FmSequence})
    if (name == family_name(f)) return f;
  throw SpecError("unknown pulse family '" + name + "'");
}

double FmSpec::coefficient(int index) const {
  for (const auto& c : coefficients)
    if (c.index == index) return c.value;
  return 0;
}

int FmSpec::max_index() const {
  int m = 0;
  for (const auto& c : coefficients) m = std::max(m, c.index);
  return m;
}

Family PulseSpec::family() const {
  switch (shape.index()) {
    case 0: return Family::AmPiecewise;
    case 1: return Family::AmContinuous;
    case 2: return std::get<FmSpec>(shape).switching_time ? Family::AmFm : Family::Fm;
    default: return Family::FmSequence;
  }
}

double PulseSpec::length() const {
  if (const auto* s = std::get_if<FmSequenceSpec>(&shape))
    return static_cast<double>(s->segments.size());
  return 1.0;
}

namespace {

void validate_fm(const FmSpec& fm) {
  if (!std::isfinite(fm.amplitude)) throw SpecError("FM amplitude is not finite");
  std::vector<int> seen;
  for (const auto& c : fm.coefficients) {
    if (c.index < 1) throw SpecError("Fourier coefficient indices start at 1");
    if (!std::isfinite(c.value)) throw SpecError("Fourier coefficient is not finite");
    if (std::find(seen.begin(), seen.end(), c.index) != seen.end())
      throw SpecError("duplicate Fourier coefficient b" + std::to_string(c.index));
    seen.push_back(c.index);
  }
  if (fm.switching_time) {
    const double ts = *fm.switching_time;
    if (!(ts > 0 && ts <= 0.5)) throw SpecError("switching time must lie in (0, tau_p/2]");
  }
}

}  // namespace

void validate(const PulseSpec& spec) {
  if (!(spec.duration > 0)) throw SpecError("duration must be positive");
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) {
    if (!std::isfinite(p->amplitude)) throw SpecError("amplitude is not finite");
    double prev = 0;
    for (double t : p->instants) {
      if (!(t > prev && t < 1)) throw SpecError("switching instants must increase inside (0, 1)");
      prev = t;
    }
    if (p->signs.size() != p->instants.size() + 1)
      throw SpecError("sign pattern needs one entry per segment");
    for (int s : p->signs)
      if (s != 1 && s != -1) throw SpecError("segment signs must be +1 or -1");
  } else if (const auto* c = std::get_if<ContinuousAmSpec>(&spec.shape)) {
    if (!std::isfinite(c->a) || !std::isfinite(c->b)) throw SpecError("shape constants not finite");
  } else if (const auto* f = std::get_if<FmSpec>(&spec.shape)) {
    validate_fm(*f);
  } else {
    const auto& s = std::get<FmSequenceSpec>(spec.shape);
    if (s.segments.empty()) throw SpecError("sequence has no segments");
    for (const auto& seg : s.segments) validate_fm(seg);
  }
}

double envelope(double t, std::optional<double> ts) {
  if (!ts) return 1;
  const double s = *ts;
  auto on = [s](double u) {
    const double x = std::sin(kPi * u / (2 * s));
    return x * x;
  };
  if (t < s) return on(t);
  if (t < 1 - s) return 1;
  return 1 - on(t - (1 - s));
}

FmPhase::FmPhase(const FmSpec& spec) {
  const int n = (spec.max_index() + 1) / 2;
  sine_.assign(n, 0.0);
  cosine_.assign(n, 0.0);
  for (const auto& c : spec.coefficients) {
    const int h = (c.index + 1) / 2 - 1;
    (c.index % 2 ? sine_ : cosine_)[h] += c.value;
  }
}

double FmPhase::operator()(double t, double* derivative) const {
  const std::complex<double> step = std::polar(1.0, 2 * kPi * t);
  std::complex<double> e = step;
  double omega = 0, d = 0;
  for (std::size_t k = 0; k < sine_.size(); ++k) {
    const double n = static_cast<double>(k + 1);
    omega += sine_[k] * e.imag() + cosine_[k] * (e.real() - 1);
    d += 2 * kPi * n * (sine_[k] * e.real() - cosine_[k] * e.imag());
    e *= step;
  }
  if (derivative) *derivative = d;
  return omega;
}

FmSpec time_reverse(const FmSpec& spec) {
  FmSpec r = spec;
  for (auto& c : r.coefficients)
    if (c.index % 2) c.value = -c.value;
  return r;
}

ControlSample eval_control(const PulseSpec& spec, double t) {
  const double len = spec.length();
  if (!(t >= 0 && t <= len))
    throw SpecError("time " + std::to_string(t) + " outside the pulse [0, " +
                    std::to_string(len) + "]");
  ControlSample c;
  c.t = t;
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) {
    // Segments are half-open [tau_k, tau_{k+1}); the last includes tau_p.
    const auto k = std::upper_bound(p->instants.begin(), p->instants.end(), t) -
                   p->instants.begin();
    c.v = {0, p->signs[k] * p->amplitude, 0};
    return c;
  }
  if (const auto* a = std::get_if<ContinuousAmSpec>(&spec.shape)) {
    const double h = spec.target.radians / 2;
    const double w = 2 * kPi * t;
    c.v = {0, h + (a->a - h) * std::cos(w) + (a->b - a->a) * std::cos(2 * w) - a->b * std::cos(3 * w), 0};
    return c;
  }
  if (const auto* f = std::get_if<FmSpec>(&spec.shape)) return fm_sample(*f, t);
  double local = 0;
  const FmSpec& seg = segment_at(std::get<FmSequenceSpec>(spec.shape), t, &local);
  c = fm_sample(seg, local);
  c.t = t;
  return c;
}

double am_angle(const PulseSpec& spec, double t) {
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) {
    double psi = 0, prev = 0;
    for (std::size_t k = 0; k <= p->instants.size(); ++k) {
      const double end = k < p->instants.size() ? p->instants[k] : 1.0;
      const double hi = std::min(end, t);
      if (hi > prev) psi += 2 * p->signs[k] * p->amplitude * (hi - prev);
      if (end >= t) break;
      prev = end;
    }
    return psi;
  }
  if (const auto* a = std::get_if<ContinuousAmSpec>(&spec.shape)) {
    const double th = spec.target.radians;
    const double w = 2 * kPi * t;
    return th * t + (a->a - th / 2) * std::sin(w) / kPi + (a->b - a->a) * std::sin(2 * w) / (2 * kPi) -
           a->b * std::sin(3 * w) / (3 * kPi);
  }
  throw SpecError("closed-form angle requires a fixed-axis (AM) pulse");
}

double total_angle_am(const PulseSpec& spec) { return am_angle(spec, 1.0); }

std::vector<double> breakpoints(const PulseSpec& spec) {
  std::vector<double> b{0.0};
  auto add_fm = [&b](const FmSpec& f, double offset) {
    if (f.switching_time) {
      b.push_back(offset + *f.switching_time);
      b.push_back(offset + 1 - *f.switching_time);
    }
    b.push_back(offset + 1);
  };
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) {
    b.insert(b.end(), p->instants.begin(), p->instants.end());
    b.push_back(1.0);
  } else if (std::holds_alternative<ContinuousAmSpec>(spec.shape)) {
    b.push_back(1.0);
  } else if (const auto* f = std::get_if<FmSpec>(&spec.shape)) {
    add_fm(*f, 0);
  } else {
    const auto& s = std::get<FmSequenceSpec>(spec.shape);
    for (std::size_t k = 0; k < s.segments.size(); ++k) add_fm(s.segments[k], static_cast<double>(k));
  }
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  return b;
}

double peak_amplitude(const PulseSpec& spec) {
  if (const auto* p = std::get_if<PiecewiseAmSpec>(&spec.shape)) return std::fabs(p->amplitude);
  if (const auto* f = std::get_if<FmSpec>(&spec.shape)) return std::fabs(f->amplitude);
  if (const auto* s = std::get_if<FmSequenceSpec>(&spec.shape)) {
    double m = 0;
    for (const auto& seg : s->segments) m = std::max(m, std::fabs(seg.amplitude));
    return m;
  }
  // Continuous AM: dense scan, then golden refinement around the best sample.
  auto mag = [&](double t) { return std::fabs(eval_control(spec, t).v[1]); };
  constexpr int n = 2000;
  int best = 0;
  double bv = -1;
  for (int i = 0; i <= n; ++i) {
    const double v = mag(static_cast<double>(i) / n);
    if (v > bv) bv = v, best = i;
  }
  double lo = std::max(0.0, (best - 1.0) / n), hi = std::min(1.0, (best + 1.0) / n);
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 60; ++it) {
    const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
    if (mag(m1) > mag(m2)) hi = m2; else lo = m1;
  }
  return std::max(bv, mag(0.5 * (lo + hi)));
}

double rate_bound(const PulseSpec& spec) {
  auto fm_rate = [](const FmSpec& f) {
    double r = 2 * std::fabs(f.amplitude);
    for (const auto& c : f.coefficients) r += 2 * kPi * ((c.index + 1) / 2) * std::fabs(c.value);
    if (f.switching_time) r += 2 * std::fabs(f.amplitude);
    return r;
  };
  if (const auto* f = std::get_if<FmSpec>(&spec.shape)) return fm_rate(*f);
  if (const auto* s = std::get_if<FmSequenceSpec>(&spec.shape)) {
    double m = 0;
    for (const auto& seg : s->segments) m = std::max(m, fm_rate(seg));
    return m;
  }
  return 2 * peak_amplitude(spec) + 6 * kPi;
}

std::vector<int> alternating_signs(std::size_t instants) {
  std::vector<int> s(instants + 1);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = k % 2 ? -1 : 1;
  return s;
}

}  // namespace modpulse
