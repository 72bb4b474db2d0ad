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

#include "modpulse/amplitude_minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "modpulse/error.hpp"
#include "modpulse/parallel.hpp"

namespace modpulse {

namespace {

struct Solved {
  std::vector<double> x;  // full parameter vector
  double amplitude = 0;
  double residue = 0;
};

class SpareScan {
 public:
  SpareScan(const SpareProblem& p, const MinimizeConfig& cfg) : p_(p), cfg_(cfg) {}

  // Solve with the spare pinned at s, starting from `warm`.
  std::optional<Solved> solve_at(double s, const std::vector<double>& warm) {
    const int k = p_.spare;
    auto expand = [k, s](std::span<const double> y) {
      std::vector<double> x(y.size() + 1);
      for (std::size_t i = 0, j = 0; i < x.size(); ++i) x[i] = static_cast<int>(i) == k ? s : y[j++];
      return x;
    };
    std::vector<double> y0;
    for (std::size_t i = 0; i < warm.size(); ++i)
      if (static_cast<int>(i) != k) y0.push_back(warm[i]);
    auto reduced = [&](std::span<const double> y) { return p_.residuals(expand(y)); };
    const RootResult r = find_root(reduced, y0, cfg_.solver);
    if (!r.converged()) return std::nullopt;
    Solved out;
    out.x = expand(r.x);
    out.amplitude = p_.amplitude(out.x);
    out.residue = r.residue;
    return out;
  }

  std::map<double, std::optional<Solved>> points;

 private:
  const SpareProblem& p_;
  const MinimizeConfig& cfg_;
};

bool better(const Solved& a, double sa, const Solved& b, double sb) {
  if (a.amplitude != b.amplitude) return a.amplitude < b.amplitude;
  return std::fabs(sa) < std::fabs(sb);
}

struct CandidateResult {
  std::optional<Solved> best;
  std::vector<ScanPoint> trace;
};

CandidateResult run_candidate(const SpareProblem& p, const MinimizeConfig& cfg) {
  CandidateResult out;
  if (p.spare < 0) {
    const RootResult r = find_root(p.residuals, p.start, cfg.solver);
    if (r.converged()) out.best = Solved{r.x, p.amplitude(r.x), r.residue};
    return out;
  }
  SpareScan scan(p, cfg);
  const int k = p.spare;
  double s0 = p.start[k];
  auto center = scan.solve_at(s0, p.start);
  if (!center) {
    // Let the spare move too, then scan around wherever that lands.
    const RootResult r = find_root(p.residuals, p.start, cfg.solver);
    if (!r.converged()) return out;
    s0 = r.x[k];
    center = scan.solve_at(s0, r.x);
    if (!center) return out;
  }
  scan.points[s0] = center;

  const int half = std::max(1, cfg.scan_points / 2);
  const double step = cfg.scan_halfwidth / half;
  // Walk outward in both directions, warm-starting from the neighbour.
  auto walk = [&](int dir, int count, double from, std::vector<double> warm) {
    double s = from;
    for (int i = 0; i < count; ++i) {
      s += dir * step;
      auto r = scan.solve_at(s, warm);
      scan.points[s] = r;
      if (!r) break;
      warm = r->x;
    }
  };
  walk(-1, half, s0, center->x);
  walk(+1, half, s0, center->x);

  auto best_key = [&]() -> std::optional<double> {
    std::optional<double> key;
    for (const auto& [s, r] : scan.points)
      if (r && (!key || better(*r, s, *scan.points[*key], *key))) key = s;
    return key;
  };
  // Extend the scan while the minimum sits on the edge of the feasible set.
  for (int e = 0; e < cfg.max_extensions; ++e) {
    const auto key = best_key();
    if (!key) break;
    auto it = scan.points.find(*key);
    const bool low_edge = it == scan.points.begin();
    const bool high_edge = std::next(it) == scan.points.end();
    if (!low_edge && !high_edge) break;
    const auto before = scan.points.size();
    walk(low_edge ? -1 : +1, 1, *key, it->second->x);
    if (scan.points.size() == before) break;
    if (!scan.points.rbegin()->second && high_edge) break;
    if (!scan.points.begin()->second && low_edge) break;
  }

  const auto key = best_key();
  if (!key) return out;
  auto it = scan.points.find(*key);
  double lo = it == scan.points.begin() ? *key : std::prev(it)->first;
  double hi = std::next(it) == scan.points.end() ? *key : std::next(it)->first;
  Solved best = *it->second;
  double best_s = *key;

  // Golden section on [lo, hi], warm-started from the nearest solved point.
  auto value_at = [&](double s) {
    const auto near = std::min_element(scan.points.begin(), scan.points.end(), [&](const auto& a, const auto& b) {
      const double da = a.second ? std::fabs(a.first - s) : std::numeric_limits<double>::infinity();
      const double db = b.second ? std::fabs(b.first - s) : std::numeric_limits<double>::infinity();
      return da < db;
    });
    auto r = scan.solve_at(s, near->second->x);
    scan.points[s] = r;
    if (!r) return std::numeric_limits<double>::infinity();
    if (better(*r, s, best, best_s)) {
      best = *r;
      best_s = s;
    }
    return r->amplitude;
  };
  const double g = (std::sqrt(5.0) - 1) / 2;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = value_at(c), fd = value_at(d);
  while (b - a > cfg.spare_tolerance) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = value_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = value_at(d);
    }
  }
  for (const auto& [s, r] : scan.points) out.trace.push_back({s, r ? r->amplitude : 0.0, r.has_value()});
  out.best = best;
  return out;
}

}  // namespace

MinimizeResult minimize_amplitude(const std::vector<SpareProblem>& candidates, const MinimizeConfig& cfg) {
  std::vector<CandidateResult> results(candidates.size());
  parallel_for(candidates.size(), [&](std::size_t i) { results[i] = run_candidate(candidates[i], cfg); },
               cfg.workers);
  MinimizeResult out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    out.traces.push_back(results[i].trace);
    const auto& r = results[i].best;
    if (!r) continue;
    const int k = candidates[i].spare;
    const double s = k >= 0 ? r->x[k] : 0.0;
    const double cur = out.feasible && candidates[out.candidate].spare >= 0
                           ? out.x[candidates[out.candidate].spare]
                           : 0.0;
    if (!out.feasible || r->amplitude < out.amplitude ||
        (r->amplitude == out.amplitude && std::fabs(s) < std::fabs(cur))) {
      out.x = r->x;
      out.amplitude = r->amplitude;
      out.residue = r->residue;
      out.feasible = true;
      out.candidate = static_cast<int>(i);
    }
  }
  if (!out.feasible) throw SolverError("no feasible root found from any start");
  return out;
}

}  // namespace modpulse
