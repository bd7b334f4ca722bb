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
#include <cstdint>
#include <numbers>
#include <vector>

#include "qlg/lattice.hpp"
#include "qlg/spin/readout.hpp"
#include "qlg/spin/slice_encoding.hpp"
#include "qlg/spin/spin_system.hpp"

namespace qlg::spin {

enum class RotationMode { ideal, finite_power };

enum class EncodingMode {
  exact,  ///< ideal per-slice rotations prepare the node state
  shaped  ///< gradient + shaped pulses, streamed by frequency shifts
};

/// Error switches and geometry of a simulated NMR run. The lattice sites are
/// the slices of `lattice`.
struct ExperimentConfig {
  SpinSystem system;
  SliceLattice lattice;
  MassDensityField initial_density;
  std::size_t steps = 0;

  RotationMode rotations = RotationMode::ideal;
  /// Hard-pulse nutation rate in units of J (finite_power only).
  double nutation_ratio = 50.0;

  EncodingMode encoding = EncodingMode::exact;
  /// Largest tip angle of a shaped encoding pulse.
  double flip_angle = 0.25 * std::numbers::pi;
  /// Carbon decoupling during shaped encoding. A zero spacing in pulsed
  /// mode means 1/(50 J).
  Decoupling decoupling;

  ReadoutOptions readout{ReadoutBinning::direct};
  /// Standard deviation of Gaussian noise added to every read occupation.
  double readout_noise = 0.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument for an inconsistent configuration.
  void validate() const;

  double nutation_hz() const;
  double decoupling_spacing() const;

  /// All switches ideal, exact encoding, direct readout.
  static ExperimentConfig ideal(const MassDensityField& rho0, std::size_t steps);
  /// Shaped pi/4 encoding, 50 J hard pulses, pulsed decoupling, spectral
  /// readout.
  static ExperimentConfig realistic(const MassDensityField& rho0, std::size_t steps);
};

struct StepDiagnostics {
  /// Total density after the step.
  double mass = 0.0;
  /// RMS of decoded encoded occupations against their targets.
  double encoding_error = 0.0;
  /// Read occupations outside [0, 1] in this step.
  std::size_t out_of_range = 0;
};

struct ExperimentResult {
  /// Frame t is the density after t steps; frame 0 is the input.
  Trajectory densities;
  /// Occupations entering each step plus the final streamed occupations.
  std::vector<std::vector<OccupationPair>> occupations;
  std::vector<StepDiagnostics> diagnostics;
  double collision_fidelity = 1.0;
  double swap_fidelity = 1.0;
};

/// Encode, collide, read out and stream for `config.steps` steps, slice by
/// slice, on fresh pseudo-pure states each step.
ExperimentResult simulate_experiment(const ExperimentConfig& config);

}  // namespace qlg::spin
