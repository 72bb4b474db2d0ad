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

#include "modpulse/noise_paths.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "modpulse/error.hpp"

namespace modpulse {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Box-Muller on the engine's raw output: reproducible across standard
// libraries, unlike std::normal_distribution.
class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2 * std::log(u1));
    spare_ = r * std::sin(2 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0;
  bool has_spare_ = false;
};

Vec3 means(const NoiseModel& m) { return {0, 0, m.eta_bar_z}; }
Vec3 sdevs(const NoiseModel& m) { return {std::sqrt(m.s_x2), std::sqrt(m.s_x2), std::sqrt(m.s_z2)}; }

}  // namespace

Vec3 NoiseRealization::at(std::size_t k) const {
  if (is_static()) return {path[0][0], path[1][0], path[2][0]};
  return {path[0][k], path[1][k], path[2][k]};
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(splitmix64(seed) ^ (index * 0xD1B54A32D192ED03ull));
}

NoiseRealization sample_static(const NoiseModel& model, std::uint64_t seed) {
  model.validate();
  NoiseRealization r;
  r.generator = NoiseGenerator::StaticGaussian;
  r.seed = seed;
  Gaussian g(seed);
  const Vec3 mu = means(model), sd = sdevs(model);
  for (int c = 0; c < 3; ++c) r.path[c] = {mu[c] + sd[c] * g()};
  return r;
}

NoiseRealization sample_ou(const NoiseModel& model, const std::vector<double>& times, std::uint64_t seed,
                           double tau_c) {
  model.validate();
  const double tc = tau_c > 0 ? tau_c : model.tau_c;
  if (!(tc > 0)) throw SpecError("OU noise needs a positive correlation time");
  NoiseRealization r;
  r.generator = NoiseGenerator::OrnsteinUhlenbeck;
  r.seed = seed;
  r.times = times;
  Gaussian g(seed);
  const Vec3 mu = means(model), sd = sdevs(model);
  for (int c = 0; c < 3; ++c) r.path[c].resize(times.size());
  Vec3 x{};
  for (int c = 0; c < 3; ++c) x[c] = sd[c] * g();  // stationary start
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0) {
      const double a = std::exp(-(times[k] - times[k - 1]) / tc);
      const double b = std::sqrt(-std::expm1(-2 * (times[k] - times[k - 1]) / tc));
      for (int c = 0; c < 3; ++c) x[c] = a * x[c] + sd[c] * b * g();
    }
    for (int c = 0; c < 3; ++c) r.path[c][k] = mu[c] + x[c];
  }
  return r;
}

NoiseRealization symmetry_image(const NoiseRealization& r, const NoiseModel& model, int quarter_turns, bool flip) {
  NoiseRealization out = r;
  const Vec3 mu = means(model);
  for (std::size_t k = 0; k < r.samples(); ++k) {
    double x = r.path[0][k], y = r.path[1][k];
    for (int q = 0; q < (quarter_turns & 3); ++q) {
      const double t = x;
      x = -y;
      y = t;
    }
    out.path[0][k] = x;
    out.path[1][k] = y;
    if (flip)
      for (int c = 0; c < 3; ++c) out.path[c][k] = 2 * mu[c] - out.path[c][k];
  }
  return out;
}

}  // namespace modpulse
