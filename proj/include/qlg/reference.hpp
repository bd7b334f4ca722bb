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

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>

#include "qlg/lattice.hpp"

// Classical and analytic references for the lattice-gas diffusion runs.
namespace qlg::reference {

/// rho'(z) = (rho(z + dz) + rho(z - dz)) / 2 on a ring.
MassDensityField classical_average_step(std::span<const double> rho);

/// Per-site residual of the discrete diffusion equation,
///   [rho_next(z) - rho(z)] - [rho(z+dz) - 2 rho(z) + rho(z-dz)] / 2.
/// Zero when rho_next is the two-neighbour average of rho.
MassDensityField finite_difference_residual(std::span<const double> rho,
                                            std::span<const double> rho_next);

struct ContinuumParams {
  double diffusion_coefficient = 0.5;
  double period = 1.0;

  void validate() const;

  /// D = dz^2 / (2 dt), L = n_sites * dz.
  static ContinuumParams from_lattice(const LatticeConfig& cfg);
};

/// Gaussian of total mass `mass` (summed over sites) centred at `center`
/// (same length units as the lattice). sigma == 0 is a point mass.
struct GaussianProfile {
  double center = 0.0;
  double sigma = 1.0;
  double mass = 1.0;
};

struct UniformProfile {
  double level = 0.0;
};

using ProfileSpec = std::variant<GaussianProfile, UniformProfile>;

/// Periodic heat-kernel solution at time t sampled at site centres
/// z_j = j * dz. Series are summed until the next term is below 1e-14 of
/// the partial sum. Throws std::invalid_argument for t < 0.
MassDensityField continuum_solution(const ProfileSpec& profile, double t,
                                    const ContinuumParams& params, const LatticeConfig& sites);

/// Wrapped Gaussian density per unit length at signed offset x from the
/// centre, on a ring of circumference `period`.
double wrapped_gaussian(double x, double sigma, double period);

/// Circular mean of a periodic field, in site units within [0, n). Uses the
/// first trigonometric moment. Returns nullopt when the moment vanishes
/// (flat field).
std::optional<double> circular_mean(std::span<const double> rho);

/// Spatial variance about the circular mean with minimal-image distances,
/// in length^2. Returns nullopt for a flat field or zero mass.
std::optional<double> periodic_variance(std::span<const double> rho, const LatticeConfig& cfg);

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DiffusionFit {
  double diffusion_coefficient = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t frames_used = 0;
};

/// Least-squares slope of variance against time (frame i at t = i * dt),
/// halved. Only frames whose width satisfies 4 sigma <= L / 2 are used.
/// Throws FitError with fewer than three usable frames or a flat trajectory.
DiffusionFit fit_diffusion_coefficient(const Trajectory& trajectory, const LatticeConfig& cfg,
                                       std::size_t first_frame = 0,
                                       std::optional<std::size_t> last_frame = std::nullopt);

/// sqrt(2 D t). Throws std::invalid_argument on negative input.
double rms_displacement(double diffusion_coefficient, double t);

/// Root-mean-square of a - b. Throws std::invalid_argument on length mismatch.
double rms_difference(std::span<const double> a, std::span<const double> b);

double total_mass(std::span<const double> rho);

}  // namespace qlg::reference
