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

#include "modpulse/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "modpulse/error.hpp"
#include "modpulse/parallel.hpp"

namespace modpulse {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i <= hi; ++i) v.push_back(i);
  return v;
}

bool is_fm(Family f) { return f == Family::Fm || f == Family::AmFm; }

std::string describe(const std::vector<double>& x) {
  std::ostringstream os;
  os.precision(6);
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? " " : "") << x[i];
  return os.str();
}

}  // namespace

std::vector<int> default_coefficients(int order, const NoiseModel& noise) {
  if (order == 1) return range(1, 4);
  return noise.pure_dephasing_only() ? range(1, 7) : range(1, 10);
}

std::vector<int> spare_choices(int order, const NoiseModel& noise) {
  if (order == 1) return {5, 6, 7, 8};
  return noise.pure_dephasing_only() ? std::vector<int>{8, 9, 10, 11} : std::vector<int>{11, 12, 13, 14};
}

PulseSpec ansatz_for(const SynthesisRequest& req, const std::vector<int>& coefficients) {
  PulseSpec s;
  s.target = req.target;
  switch (req.family) {
    case Family::AmPiecewise: {
      PiecewiseAmSpec p;
      p.amplitude = 1;
      for (int k = 0; k < req.instants; ++k) p.instants.push_back((k + 1.0) / (req.instants + 1));
      p.signs = alternating_signs(p.instants.size());
      s.shape = p;
      break;
    }
    case Family::AmContinuous:
      s.shape = ContinuousAmSpec{};
      break;
    case Family::Fm:
    case Family::AmFm: {
      FmSpec f;
      f.amplitude = req.target.radians;
      for (int i : coefficients) f.coefficients.push_back({i, 0.0});
      if (req.family == Family::AmFm) f.switching_time = req.switching_time.value_or(0.1);
      s.shape = f;
      break;
    }
    default:
      throw SpecError("sequences are composed, not synthesized");
  }
  return s;
}

std::vector<std::vector<double>> cold_starts(const ResidualSystem& system, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uni(0, 1);
  const PulseSpec& a = system.request().ansatz;
  const double theta = a.target.radians;
  std::vector<std::vector<double>> out;
  for (int k = 0; k < count; ++k) {
    const double spread = k == 0 ? 0.0 : 1.0;
    std::vector<double> x(system.parameter_count());
    if (std::holds_alternative<PiecewiseAmSpec>(a.shape)) {
      const std::size_t m = x.size() - 1;
      const double top = system.request().symmetric ? 0.5 : 1.0;
      std::vector<double> t(m);
      for (std::size_t i = 0; i < m; ++i)
        t[i] = k == 0 ? top * (i + 1.0) / (m + 1) : top * (0.02 + 0.96 * uni(rng));
      std::sort(t.begin(), t.end());
      std::copy(t.begin(), t.end(), x.begin());
      x.back() = k == 0 ? 2 * theta : theta * (1 + 3 * uni(rng));
    } else if (std::holds_alternative<ContinuousAmSpec>(a.shape)) {
      x = {spread * 3 * normal(rng), spread * 3 * normal(rng)};
    } else {
      x[0] = theta * (1 + spread * 0.3 * std::fabs(normal(rng)));
      for (std::size_t i = 1; i < x.size(); ++i) x[i] = spread * 0.5 * normal(rng);
    }
    out.push_back(std::move(x));
  }
  return out;
}

namespace {

SynthesisResult finish(const ResidualSystem& sys, const std::vector<double>& x, std::vector<SynthesisLogEntry> log,
                       std::string provenance, const SolverConfig& solver) {
  SynthesisResult r;
  r.spec = sys.spec_for(x);
  r.residuals = evaluate_residuals(r.spec, sys.request().order, sys.request().noise, sys.request().eval);
  r.log = std::move(log);
  r.provenance = std::move(provenance);
  r.success = r.residuals.residue() < solver.acceptance;
  r.spec.note = r.provenance;
  return r;
}

std::vector<double> start_vector(const ResidualSystem& sys, const PulseSpec& start) {
  // Coefficients absent from the start are zero; amplitude and instants are
  // taken over when the families match.
  PulseSpec s = sys.request().ansatz;
  if (auto* fm = std::get_if<FmSpec>(&s.shape)) {
    const auto* src = std::get_if<FmSpec>(&start.shape);
    if (!src) throw SpecError("start spec family does not match the ansatz");
    fm->amplitude = src->amplitude;
    for (auto& c : fm->coefficients) c.value = src->coefficient(c.index);
  } else if (auto* p = std::get_if<PiecewiseAmSpec>(&s.shape)) {
    const auto* src = std::get_if<PiecewiseAmSpec>(&start.shape);
    if (!src || src->instants.size() != p->instants.size())
      throw SpecError("start spec does not match the piecewise ansatz");
    *p = *src;
  } else {
    const auto* src = std::get_if<ContinuousAmSpec>(&start.shape);
    if (!src) throw SpecError("start spec family does not match the ansatz");
    s.shape = *src;
  }
  return sys.parameters_of(s);
}

}  // namespace

SynthesisResult synthesize(const SynthesisRequest& req) {
  req.noise.validate();
  std::vector<int> coeffs = req.coefficients.empty() ? default_coefficients(req.order, req.noise) : req.coefficients;

  auto make_system = [&](const std::vector<int>& c) {
    SystemRequest sr;
    sr.ansatz = ansatz_for(req, c);
    if (!req.starts.empty() && req.family == Family::AmPiecewise) {
      // Sign pattern and instant count come from the start when given.
      const auto* p = std::get_if<PiecewiseAmSpec>(&req.starts.front().shape);
      if (p) sr.ansatz.shape = *p;
    }
    sr.order = req.order;
    sr.noise = req.noise;
    sr.symmetric = req.symmetric;
    sr.eval = req.eval;
    return ResidualSystem(sr);
  };

  const ResidualSystem base = make_system(coeffs);
  std::vector<SynthesisLogEntry> log;

  if (req.minimize) {
    if (!is_fm(req.family)) throw SpecError("amplitude minimization is offered for FM families");
    // One system per spare choice; the spare is the extra coefficient.
    std::vector<ResidualSystem> systems;
    std::vector<SpareProblem> problems;
    for (int extra : spare_choices(req.order, req.noise)) {
      if (std::find(coeffs.begin(), coeffs.end(), extra) != coeffs.end()) continue;
      std::vector<int> c = coeffs;
      c.push_back(extra);
      systems.push_back(make_system(c));
    }
    std::vector<std::size_t> owner;
    for (std::size_t k = 0; k < systems.size(); ++k) {
      const ResidualSystem& sys = systems[k];
      if (sys.parameter_count() != sys.independent_residuals() + 1)
        throw DimensionMismatch("minimization needs exactly one spare parameter");
      std::vector<std::vector<double>> starts;
      for (const auto& s : req.starts) starts.push_back(start_vector(sys, s));
      if (starts.empty()) {
        // The scan needs a feasible point: keep the lowest-amplitude cold roots.
        const auto cs = cold_starts(sys, req.cold_starts, req.seed);
        std::vector<RootResult> roots(cs.size());
        parallel_for(cs.size(), [&](std::size_t i) {
          roots[i] = find_root([&sys](std::span<const double> x) { return sys(x); }, cs[i], req.solver);
        });
        std::vector<std::pair<double, std::size_t>> found;
        for (std::size_t i = 0; i < roots.size(); ++i)
          if (roots[i].converged()) found.emplace_back(sys.amplitude(roots[i].x), i);
        std::sort(found.begin(), found.end());
        for (std::size_t i = 0; i < found.size() && static_cast<int>(i) < req.minimize_starts; ++i)
          starts.push_back(roots[found[i].second].x);
      }
      for (const auto& x0 : starts) {
        owner.push_back(k);
        SpareProblem p;
        p.residuals = [&sys](std::span<const double> x) { return sys(x); };
        p.amplitude = [&sys](std::span<const double> x) { return sys.amplitude(x); };
        p.spare = static_cast<int>(sys.parameter_count()) - 1;
        p.start = x0;
        problems.push_back(std::move(p));
      }
    }
    MinimizeConfig mc = req.minimizer;
    mc.solver = req.solver;
    if (problems.empty()) throw SolverError("no cold start reached a root for any spare choice");
    const MinimizeResult m = minimize_amplitude(problems, mc);
    const ResidualSystem& sys = systems[owner[m.candidate]];
    for (std::size_t i = 0; i < problems.size(); ++i) {
      double best = 0;
      bool any = false;
      for (const auto& pt : m.traces[i])
        if (pt.feasible && (!any || pt.amplitude < best)) best = pt.amplitude, any = true;
      log.push_back({static_cast<int>(i), "spare " + systems[owner[i]].parameter_names().back(), 0.0, best,
                     any ? "scanned" : "infeasible"});
    }
    log[m.candidate].residue = m.residue;
    log[m.candidate].status = "selected";
    return finish(sys, m.x, std::move(log),
                  "minimized amplitude over spare " + sys.parameter_names().back(), req.solver);
  }

  if (base.parameter_count() < base.independent_residuals())
    throw DimensionMismatch("ansatz smaller than the residual count");

  std::vector<std::vector<double>> starts;
  std::vector<std::string> origins;
  for (std::size_t i = 0; i < req.starts.size(); ++i) {
    starts.push_back(start_vector(base, req.starts[i]));
    origins.push_back(req.starts[i].dataset.empty() ? "given start" : "start " + req.starts[i].dataset);
  }
  const bool cold = starts.empty();
  if (cold) {
    starts = cold_starts(base, req.cold_starts, req.seed);
    for (std::size_t i = 0; i < starts.size(); ++i) origins.push_back("cold seed " + std::to_string(req.seed) + "#" + std::to_string(i));
  }

  std::vector<RootResult> results(starts.size());
  if (cold && req.first_success) {
    for (std::size_t i = 0; i < starts.size(); ++i) {
      results[i] = find_root([&base](std::span<const double> x) { return base(x); }, starts[i], req.solver);
      if (results[i].converged()) {
        results.resize(i + 1);
        break;
      }
    }
  } else {
    parallel_for(starts.size(), [&](std::size_t i) {
      results[i] = find_root([&base](std::span<const double> x) { return base(x); }, starts[i], req.solver);
    });
  }
  int best = -1;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const double amp = base.amplitude(r.x);
    log.push_back({static_cast<int>(i), origins[i] + " [" + describe(starts[i]) + "]", r.residue, amp,
                   status_name(r.status)});
    if (r.converged() && (best < 0 || amp < log[best].amplitude)) best = static_cast<int>(i);
  }
  if (best < 0) {
    // Report the least-bad iterate.
    best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
      if (results[i].residue < results[best].residue) best = static_cast<int>(i);
  }
  return finish(base, results[best].x, std::move(log), origins[best], req.solver);
}

PulseSpec compose_xy8_replacement(const PulseSpec& pi_spec, double tolerance) {
  const auto* fm = std::get_if<FmSpec>(&pi_spec.shape);
  if (!fm) throw SpecError("the composite is built from an FM pi pulse");
  if (std::fabs(pi_spec.target.radians - kPi) > 1e-12) throw SpecError("the composite needs a pi pulse");
  const auto report = check_spec(pi_spec, 2, NoiseModel::general(), tolerance);
  if (!report.passed())
    throw SpecError("input pulse fails the second-order general-decoherence check");
  PulseSpec c;
  c.target = TargetAngle::parse("2pi");
  c.duration = pi_spec.duration;
  c.shape = FmSequenceSpec{{*fm, time_reverse(*fm)}};
  c.note = "forward pulse followed by its time reverse";
  if (!pi_spec.dataset.empty()) c.note += " (" + pi_spec.dataset + ")";
  c.printed_decimals = pi_spec.printed_decimals;
  return c;
}

}  // namespace modpulse
