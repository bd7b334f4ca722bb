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

#include <span>
#include <vector>

#include "qlg/lattice.hpp"
#include "qlg/spin/operators.hpp"
#include "qlg/spin/pulse_sequence.hpp"
#include "qlg/spin/slice_encoding.hpp"
#include "qlg/spin/spin_system.hpp"

namespace qlg::spin {

enum class ReadoutBinning {
  direct,   ///< per-slice expectation of the number operator
  spectral  ///< pi/2 pulse, synthesized FID, DFT, band integration
};

struct ReadoutOptions {
  ReadoutBinning binning = ReadoutBinning::spectral;
  /// Width of each integration band relative to the slice spacing. Values
  /// above 1 make neighbouring bands overlap and are rejected.
  double band_fraction = 1.0;
  /// Lorentzian full width at half maximum applied to the FID, Hz.
  double linewidth_hz = 0.0;
  /// Nutation rate of the readout pi/2 pulse and the carbon-to-proton swap.
  double nutation_hz = kIdealNutation;

  void validate() const;
};

/// Proton occupation <n_1> per slice. `states` holds either one state per
/// slice or one per voxel (lattice order); per-slice states are replicated
/// across their voxels.
std::vector<double> read_proton(std::span<const DensityMatrix> states,
                                const SliceLattice& lattice, const SpinSystem& sys,
                                const ReadoutOptions& options = {});

/// Reads f1 from the proton, swaps the spins and reads f2 the same way.
/// The states are not modified. Throws std::invalid_argument on band
/// overlap or a state count matching neither slices nor voxels.
std::vector<OccupationPair> gradient_readout(std::span<const DensityMatrix> states,
                                             const SliceLattice& lattice,
                                             const SpinSystem& sys,
                                             const ReadoutOptions& options = {});

}  // namespace qlg::spin
