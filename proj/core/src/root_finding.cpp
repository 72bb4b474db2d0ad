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

#include "modpulse/root_finding.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace modpulse {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double l1(const VectorXd& v) { return v.cwiseAbs().sum(); }

VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

const char* status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "converged";
    case SolverStatus::Stalled: return "stalled trust region";
    case SolverStatus::SingularJacobian: return "singular Jacobian";
    case SolverStatus::IterationLimit: return "iteration limit";
  }
  return "?";
}

std::vector<std::vector<double>> fd_jacobian(const VectorFunction& f, std::span<const double> x,
                                             std::span<const double> fx, double step) {
  std::vector<std::vector<double>> j(fx.size(), std::vector<double>(x.size()));
  std::vector<double> xp(x.begin(), x.end());
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double h = step * std::max(std::fabs(x[c]), 1.0);
    xp[c] = x[c] + h;
    const double hh = xp[c] - x[c];
    const auto fp = f(xp);
    for (std::size_t r = 0; r < fx.size(); ++r) j[r][c] = (fp[r] - fx[r]) / hh;
    xp[c] = x[c];
  }
  return j;
}

RootResult find_root(const VectorFunction& func, std::vector<double> x0, const SolverConfig& cfg) {
  RootResult out;
  const Eigen::Index n = static_cast<Eigen::Index>(x0.size());
  auto eval = [&](const VectorXd& x) {
    ++out.evaluations;
    return to_eigen(func(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
  };
  VectorXd x = to_eigen(x0);
  VectorXd f = eval(x);
  const Eigen::Index m = f.size();

  VectorXd best_x = x, best_f = f;
  auto record = [&] {
    if (l1(f) < l1(best_f)) {
      best_x = x;
      best_f = f;
    }
  };
  auto finish = [&](SolverStatus s) {
    out.x.assign(best_x.data(), best_x.data() + n);
    out.f.assign(best_f.data(), best_f.data() + m);
    out.residue = l1(best_f);
    out.status = out.residue < cfg.acceptance ? SolverStatus::Converged
                 : s == SolverStatus::Converged ? SolverStatus::Stalled
                                                 : s;
    return out;
  };
  if (!f.allFinite()) return finish(SolverStatus::Stalled);

  MatrixXd J(m, n);
  auto refresh = [&] {
    const auto jj = fd_jacobian(func, std::span<const double>(x.data(), n),
                                std::span<const double>(f.data(), m), cfg.fd_step);
    out.evaluations += static_cast<int>(n);
    for (Eigen::Index r = 0; r < m; ++r)
      for (Eigen::Index c = 0; c < n; ++c) J(r, c) = jj[r][c];
  };
  refresh();

  VectorXd diag = J.colwise().norm().transpose();
  for (Eigen::Index c = 0; c < n; ++c)
    if (diag(c) == 0) diag(c) = 1;
  double delta = cfg.initial_radius * diag.cwiseProduct(x).norm();
  if (delta == 0) delta = cfg.initial_radius;

  int slow = 0;
  for (out.iterations = 0; out.iterations < cfg.max_iterations; ++out.iterations) {
    if (l1(f) < cfg.acceptance) return finish(SolverStatus::Converged);
    if (out.evaluations > cfg.max_evaluations) return finish(SolverStatus::IterationLimit);
    if (J.cwiseAbs().maxCoeff() == 0) return finish(SolverStatus::SingularJacobian);

    diag = diag.cwiseMax(J.colwise().norm().transpose());
    const MatrixXd Js = J * diag.cwiseInverse().asDiagonal();
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Js);
    cod.setThreshold(cfg.rank_tolerance);
    const VectorXd gn = -cod.solve(f);  // scaled Gauss-Newton step
    VectorXd p;
    if (gn.norm() <= delta) {
      p = gn;
    } else {
      const VectorXd g = Js.transpose() * f;
      const double gJ = (Js * g).squaredNorm();
      if (g.norm() == 0 || gJ == 0) {
        p = gn * (delta / gn.norm());
      } else {
        const VectorXd cauchy = -(g.squaredNorm() / gJ) * g;
        if (cauchy.norm() >= delta) {
          p = -(delta / g.norm()) * g;
        } else {
          // Largest tau in [0,1] with |cauchy + tau (gn - cauchy)| = delta.
          const VectorXd d = gn - cauchy;
          const double a = d.squaredNorm(), b = 2 * cauchy.dot(d),
                       c = cauchy.squaredNorm() - delta * delta;
          const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4 * a * c))) / (2 * a);
          p = cauchy + tau * d;
        }
      }
    }
    const VectorXd step = p.cwiseQuotient(diag);
    const VectorXd x_new = x + step;
    const VectorXd f_new = eval(x_new);
    const double pnorm = p.norm();

    const double fn2 = f.squaredNorm();
    const double pred = fn2 - (f + J * step).squaredNorm();
    const double actual = f_new.allFinite() ? fn2 - f_new.squaredNorm() : -1.0;
    const double rho = pred > 0 ? actual / pred : -1.0;

    if (rho < 0.1) {
      delta = 0.5 * std::min(delta, pnorm);
      ++slow;
    } else {
      slow = 0;
      if (rho > 0.75) delta = std::max(delta, 2 * pnorm);
    }
    const bool accept = rho > 1e-4;
    if (f_new.allFinite() && step.squaredNorm() > 0) {
      // Broyden rank-one update keeps J consistent with the last secant.
      J += ((f_new - f - J * step) * step.transpose()) / step.squaredNorm();
    }
    if (accept) {
      x = x_new;
      f = f_new;
      record();
    }
    if (slow >= 2) {
      refresh();
      slow = 0;
    }
    if (delta <= 1e-14 * std::max(diag.cwiseProduct(x).norm(), 1.0))
      return finish(SolverStatus::Stalled);
  }
  return finish(SolverStatus::IterationLimit);
}

}  // namespace modpulse
