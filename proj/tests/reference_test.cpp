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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qlg/reference.hpp"

namespace ref = qlg::reference;

namespace {

constexpr double kPi = std::numbers::pi;

// Periodic heat kernel as a plain Fourier series, summed far past
// convergence. Independent of the image/Fourier switch in the library.
double fourier_kernel(double x, double sigma, double period) {
  double sum = 1.0;
  for (int k = 1; k < 400; ++k) {
    sum += 2.0 * std::exp(-2.0 * kPi * kPi * k * k * sigma * sigma / (period * period)) *
           std::cos(2.0 * kPi * k * x / period);
  }
  return sum / period;
}

// Same kernel as a brute image sum.
double image_kernel(double x, double sigma, double period) {
  double sum = 0.0;
  for (int k = -200; k <= 200; ++k) {
    const double y = x + k * period;
    sum += std::exp(-0.5 * y * y / (sigma * sigma));
  }
  return sum / (sigma * std::sqrt(2.0 * kPi));
}

}  // namespace

TEST_CASE("classical average step and discrete residual") {
  const std::vector<double> rho{0.0, 1.0, 0.0, 0.0};
  const auto next = ref::classical_average_step(rho);
  CHECK(next == std::vector<double>{0.5, 0.0, 0.5, 0.0});
  const auto res = ref::finite_difference_residual(rho, next);
  for (double r : res) CHECK(std::abs(r) < 1e-15);
  CHECK_THROWS_AS(ref::classical_average_step(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ref::finite_difference_residual(rho, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("continuum parameters from the lattice") {
  const auto p = ref::ContinuumParams::from_lattice({16, 0.5, 0.25});
  CHECK(p.diffusion_coefficient == doctest::Approx(0.5));
  CHECK(p.period == doctest::Approx(8.0));
  CHECK_THROWS_AS(ref::ContinuumParams({0.0, 1.0}).validate(), std::invalid_argument);
}

TEST_CASE("wrapped gaussian agrees with independent series") {
  for (double sigma : {0.3, 1.0, 2.0, 3.9, 4.1, 8.0, 20.0}) {
    for (double x : {-7.9, -3.0, 0.0, 0.4, 5.5, 12.0}) {
      const double got = ref::wrapped_gaussian(x, sigma, 16.0);
      const double want = sigma < 4.0 ? fourier_kernel(x, sigma, 16.0) : image_kernel(x, sigma, 16.0);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST_CASE("continuum solution conserves mass and follows the heat kernel") {
  const qlg::LatticeConfig sites{64, 1.0, 1.0};
  const auto params = ref::ContinuumParams::from_lattice(sites);
  const ref::GaussianProfile g{20.0, 3.0, 7.0};
  for (double t : {0.0, 1.0, 5.0, 40.0}) {
    const auto rho = ref::continuum_solution(g, t, params, sites);
    CHECK(ref::total_mass(rho) == doctest::Approx(7.0).epsilon(1e-12));
    const double s = std::sqrt(9.0 + 2.0 * params.diffusion_coefficient * t);
    for (std::size_t j = 0; j < 64; j += 7) {
      CHECK(std::abs(rho[j] - 7.0 * fourier_kernel(j - 20.0, s, 64.0)) < 1e-12);
    }
  }
  CHECK_THROWS_AS(ref::continuum_solution(g, -1.0, params, sites), std::invalid_argument);
}

TEST_CASE("point mass and uniform profiles") {
  const qlg::LatticeConfig sites{8, 1.0, 1.0};
  const auto params = ref::ContinuumParams::from_lattice(sites);
  const auto delta = ref::continuum_solution(ref::GaussianProfile{3.0, 0.0, 1.5}, 0.0, params, sites);
  CHECK(delta[3] == 1.5);
  CHECK(ref::total_mass(delta) == 1.5);
  const auto wrapped = ref::continuum_solution(ref::GaussianProfile{-1.0, 0.0, 1.0}, 0.0, params, sites);
  CHECK(wrapped[7] == 1.0);
  const auto flat = ref::continuum_solution(ref::UniformProfile{0.7}, 3.0, params, sites);
  for (double r : flat) CHECK(r == 0.7);
}

TEST_CASE("variance of the ideal walk grows by one per step") {
  const qlg::LatticeConfig cfg{64, 1.0, 1.0};
  std::vector<double> rho(64, 0.0);
  rho[32] = 1.0;
  qlg::Trajectory traj{rho};
  for (int t = 1; t <= 8; ++t) traj.push_back(ref::classical_average_step(traj.back()));
  for (int t = 0; t <= 8; ++t) {
    const auto v = ref::periodic_variance(traj[t], cfg);
    REQUIRE(v.has_value());
    CHECK(std::abs(*v - t) < 1e-12);
  }
  const auto fit = ref::fit_diffusion_coefficient(traj, cfg, 1, 8);
  CHECK(fit.diffusion_coefficient == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(fit.frames_used == 8);
}

TEST_CASE("circular mean handles wraparound") {
  std::vector<double> rho(10, 0.0);
  rho[9] = 1.0;
  rho[0] = 1.0;
  const auto m = ref::circular_mean(rho);
  REQUIRE(m.has_value());
  CHECK(std::abs(*m - 9.5) < 1e-12);
  CHECK_FALSE(ref::circular_mean(std::vector<double>(10, 1.0)).has_value());
}

TEST_CASE("fit errors") {
  const qlg::LatticeConfig cfg{16, 1.0, 1.0};
  qlg::Trajectory flat(5, std::vector<double>(16, 1.0));
  CHECK_THROWS_AS(ref::fit_diffusion_coefficient(flat, cfg), ref::FitError);
  std::vector<double> rho(16, 0.0);
  rho[8] = 1.0;
  qlg::Trajectory two{rho, ref::classical_average_step(rho)};
  CHECK_THROWS_AS(ref::fit_diffusion_coefficient(two, cfg), ref::FitError);
  CHECK_THROWS_AS(ref::fit_diffusion_coefficient({}, cfg), ref::FitError);
}

TEST_CASE("rms displacement and differences") {
  CHECK(ref::rms_displacement(2.35e-9, 0.025) * 1e6 == doctest::Approx(10.8397).epsilon(1e-4));
  CHECK(ref::rms_displacement(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(ref::rms_displacement(-1.0, 1.0), std::invalid_argument);
  CHECK(ref::rms_difference(std::vector<double>{1, 2}, std::vector<double>{1, 4}) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(ref::rms_difference(std::vector<double>{1}, std::vector<double>{1, 2}), std::invalid_argument);
}

TEST_CASE("lattice walk approaches the continuum solution") {
  const qlg::LatticeConfig cfg{64, 1.0, 1.0};
  const auto params = ref::ContinuumParams::from_lattice(cfg);
  const ref::GaussianProfile g{32.0, 3.0, 10.0};
  auto rho = ref::continuum_solution(g, 0.0, params, cfg);
  for (int t = 1; t <= 10; ++t) {
    rho = ref::classical_average_step(rho);
    const auto exact = ref::continuum_solution(g, t, params, cfg);
    CHECK(ref::rms_difference(rho, exact) < 5e-3);
  }
}
