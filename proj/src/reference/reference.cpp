// Copyright 2026 The QLG Authors
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

#include "qlg/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace qlg::reference {

namespace {

constexpr double kSeriesTolerance = 1e-14;
constexpr double kPi = std::numbers::pi;

// Wraps x into [-period/2, period/2).
double wrap_offset(double x, double period) {
  double r = std::fmod(x + 0.5 * period, period);
  if (r < 0.0) r += period;
  return r - 0.5 * period;
}

}  // namespace

MassDensityField classical_average_step(std::span<const double> rho) {
  const std::size_t n = rho.size();
  if (n == 0) throw std::invalid_argument("classical_average_step: empty field");
  MassDensityField out(n);
  for (std::size_t z = 0; z < n; ++z) {
    out[z] = 0.5 * (rho[(z + 1) % n] + rho[(z + n - 1) % n]);
  }
  return out;
}

MassDensityField finite_difference_residual(std::span<const double> rho,
                                            std::span<const double> rho_next) {
  const std::size_t n = rho.size();
  if (n != rho_next.size()) {
    throw std::invalid_argument("finite_difference_residual: length mismatch");
  }
  MassDensityField out(n);
  for (std::size_t z = 0; z < n; ++z) {
    const double lhs = rho_next[z] - rho[z];
    const double rhs = 0.5 * (rho[(z + 1) % n] - 2.0 * rho[z] + rho[(z + n - 1) % n]);
    out[z] = lhs - rhs;
  }
  return out;
}

void ContinuumParams::validate() const {
  if (!(diffusion_coefficient > 0.0)) {
    throw std::invalid_argument("diffusion coefficient must be positive");
  }
  if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
}

ContinuumParams ContinuumParams::from_lattice(const LatticeConfig& cfg) {
  cfg.validate();
  return {cfg.dz * cfg.dz / (2.0 * cfg.dt), cfg.length()};
}

double wrapped_gaussian(double x, double sigma, double period) {
  const double r = wrap_offset(x, period);
  // Image sum for narrow kernels, Fourier series for wide ones.
  if (sigma < 0.25 * period) {
    const double norm = 1.0 / (sigma * std::sqrt(2.0 * kPi));
    const auto term = [&](double y) { return norm * std::exp(-0.5 * y * y / (sigma * sigma)); };
    double sum = term(r);
    for (int k = 1;; ++k) {
      const double add = term(r + k * period) + term(r - k * period);
      sum += add;
      if (add <= kSeriesTolerance * sum) break;
    }
    return sum;
  }
  double sum = 1.0;
  for (int k = 1;; ++k) {
    const double w = std::exp(-2.0 * kPi * kPi * k * k * sigma * sigma / (period * period));
    sum += 2.0 * w * std::cos(2.0 * kPi * k * r / period);
    if (2.0 * w <= kSeriesTolerance * std::abs(sum)) break;
  }
  return sum / period;
}

MassDensityField continuum_solution(const ProfileSpec& profile, double t,
                                    const ContinuumParams& params, const LatticeConfig& sites) {
  if (!(t >= 0.0)) throw std::invalid_argument("continuum_solution: negative time");
  params.validate();
  sites.validate();
  const std::size_t n = sites.n_sites;
  MassDensityField rho(n, 0.0);

  if (const auto* uniform = std::get_if<UniformProfile>(&profile)) {
    std::fill(rho.begin(), rho.end(), uniform->level);
    return rho;
  }
  const auto& g = std::get<GaussianProfile>(profile);
  if (g.sigma < 0.0) throw std::invalid_argument("gaussian width must be non-negative");
  const double variance = g.sigma * g.sigma + 2.0 * params.diffusion_coefficient * t;
  if (variance == 0.0) {
    // Point mass at t = 0 lands on the nearest site.
    const double site = std::round(g.center / sites.dz);
    const auto idx = static_cast<std::size_t>(
        std::fmod(std::fmod(site, static_cast<double>(n)) + static_cast<double>(n),
                  static_cast<double>(n)));
    rho[idx] = g.mass;
    return rho;
  }
  const double sigma = std::sqrt(variance);
  for (std::size_t j = 0; j < n; ++j) {
    const double z = static_cast<double>(j) * sites.dz;
    rho[j] = g.mass * sites.dz * wrapped_gaussian(z - g.center, sigma, params.period);
  }
  return rho;
}

std::optional<double> circular_mean(std::span<const double> rho) {
  const std::size_t n = rho.size();
  if (n == 0) return std::nullopt;
  double c = 0.0;
  double s = 0.0;
  double mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double angle = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n);
    c += rho[j] * std::cos(angle);
    s += rho[j] * std::sin(angle);
    mass += std::abs(rho[j]);
  }
  if (mass == 0.0 || std::hypot(c, s) <= 1e-12 * mass) return std::nullopt;
  double mean = std::atan2(s, c) * static_cast<double>(n) / (2.0 * kPi);
  if (mean < 0.0) mean += static_cast<double>(n);
  return mean;
}

std::optional<double> periodic_variance(std::span<const double> rho, const LatticeConfig& cfg) {
  const auto mean = circular_mean(rho);
  if (!mean) return std::nullopt;
  const double n = static_cast<double>(rho.size());
  double mass = 0.0;
  double second = 0.0;
  for (std::size_t j = 0; j < rho.size(); ++j) {
    const double d = wrap_offset(static_cast<double>(j) - *mean, n);
    mass += rho[j];
    second += rho[j] * d * d;
  }
  if (mass <= 0.0) return std::nullopt;
  return second / mass * cfg.dz * cfg.dz;
}

DiffusionFit fit_diffusion_coefficient(const Trajectory& trajectory, const LatticeConfig& cfg,
                                       std::size_t first_frame,
                                       std::optional<std::size_t> last_frame) {
  cfg.validate();
  if (trajectory.empty()) throw FitError("empty trajectory");
  const std::size_t last = std::min(last_frame.value_or(trajectory.size() - 1),
                                    trajectory.size() - 1);
  const double half_period = 0.5 * cfg.length();

  std::vector<double> times;
  std::vector<double> variances;
  for (std::size_t i = first_frame; i <= last; ++i) {
    if (trajectory[i].size() != cfg.n_sites) {
      throw std::invalid_argument("trajectory frame " + std::to_string(i) +
                                  " does not match lattice size");
    }
    const auto var = periodic_variance(trajectory[i], cfg);
    if (!var) throw FitError("frame " + std::to_string(i) + " is flat; variance undefined");
    if (4.0 * std::sqrt(*var) > half_period) continue;
    times.push_back(static_cast<double>(i) * cfg.dt);
    variances.push_back(*var);
  }
  if (times.size() < 3) {
    throw FitError("need at least 3 frames ahead of wraparound, got " +
                   std::to_string(times.size()));
  }

  const double m = static_cast<double>(times.size());
  const double t_mean = std::accumulate(times.begin(), times.end(), 0.0) / m;
  const double v_mean = std::accumulate(variances.begin(), variances.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    sxx += (times[i] - t_mean) * (times[i] - t_mean);
    sxy += (times[i] - t_mean) * (variances[i] - v_mean);
  }
  const double slope = sxy / sxx;
  if (!(slope > 0.0)) throw FitError("variance does not grow; trajectory is not diffusing");
  return {0.5 * slope, slope, v_mean - slope * t_mean, times.size()};
}

double rms_displacement(double diffusion_coefficient, double t) {
  if (diffusion_coefficient < 0.0 || t < 0.0) {
    throw std::invalid_argument("rms_displacement: negative input");
  }
  return std::sqrt(2.0 * diffusion_coefficient * t);
}

double rms_difference(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("rms_difference: length mismatch");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum / static_cast<double>(a.size()));
}

double total_mass(std::span<const double> rho) {
  return std::accumulate(rho.begin(), rho.end(), 0.0);
}

}  // namespace qlg::reference
