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
#include <vector>

#include "qlg/spin/operators.hpp"
#include "qlg/spin/spin_system.hpp"

namespace qlg::spin {

struct OffsetBand {
  double low_hz = 0.0;
  double high_hz = 0.0;
};

/// Sample slices addressed through a linear gradient. The lattice is centred
/// on z = 0 (the resonance position); each slice is represented by
/// `spins_per_slice` equally spaced voxels.
///
/// The default gradient puts proton slices about 100 Hz apart, which makes
/// one shaped encoding 10 ms long for 16 slices.
struct SliceLattice {
  std::size_t n_slices = 16;
  double slice_width = 625e-6;  ///< m
  double gradient = 3.758e-3;   ///< T/m
  std::size_t spins_per_slice = 8;

  void validate() const;

  double length() const { return static_cast<double>(n_slices) * slice_width; }
  std::size_t voxel_count() const { return n_slices * spins_per_slice; }
  double slice_center(std::size_t slice) const;
  double voxel_position(std::size_t voxel) const;
  std::size_t slice_of(std::size_t voxel) const { return voxel / spins_per_slice; }

  /// Gradient offset at position z (m), Hz.
  double offset_hz(double z, const SpinSystem& sys, Spin spin) const;
  /// Offset difference between neighbouring slice centres, Hz.
  double slice_spacing_hz(const SpinSystem& sys, Spin spin = Spin::proton) const;
  /// Frequency band of one slice; `fraction` scales its width relative to
  /// the slice spacing.
  OffsetBand band(std::size_t slice, const SpinSystem& sys, Spin spin,
                  double fraction = 1.0) const;
};

/// Sampled RF waveform for slice-selective encoding on the proton.
///
/// Each sample holds the two RF quadratures as one complex number,
/// real part w_y and imaginary part w_x, both in rad/s. The pulse is played
/// under the gradient and followed by a reversed-gradient refocusing lobe of
/// (N/2 - 1/2) samples, which centres the excited k-space on zero.
struct ShapedPulse {
  std::vector<cplx> samples;
  double sample_period = 0.0;      ///< s
  double frequency_shift_hz = 0.0; ///< accumulated streaming shift

  void validate() const;
  double duration() const { return static_cast<double>(samples.size()) * sample_period; }
  double refocus_duration() const;
  /// Sum of |w(n dt)| dt; bounds the rotation any voxel can experience.
  double total_flip_angle() const;
};

/// Designs a pulse whose first-order response tips slice j of the proton by
/// `tip_angles[j]` about the pulse axis. One sample per slice; the linear
/// slice-averaged response matrix is inverted exactly.
ShapedPulse design_shaped_pulse(std::span<const double> tip_angles, const SliceLattice& lattice,
                                const SpinSystem& sys);

/// Scales `profile` so its largest magnitude maps to `peak_flip` and designs
/// the pulse for those tip angles. An all-zero profile gives a zero waveform.
ShapedPulse design_profile_pulse(std::span<const double> profile, double peak_flip,
                                 const SliceLattice& lattice, const SpinSystem& sys);

/// Rescales the whole waveform until the summed, exactly simulated profile
/// equals the sum of sin(tip_angles). Only the overall amplitude changes; the
/// nonlinear shape distortion is left in place.
ShapedPulse calibrate_amplitude(const ShapedPulse& pulse, std::span<const double> tip_angles,
                                const SliceLattice& lattice, const SpinSystem& sys,
                                int iterations = 4);

/// First-order (linear k-space) prediction of the slice-averaged proton
/// transverse magnetization m_x + i m_y, starting from +z.
std::vector<cplx> first_order_profile(const ShapedPulse& pulse, const SliceLattice& lattice,
                                      const SpinSystem& sys);

struct ShapedEncodeResult {
  /// Slice-averaged m_x + i m_y from exact propagation.
  std::vector<cplx> transverse;
  /// Same quantity from the first-order Fourier relation.
  std::vector<cplx> first_order;
  /// ||exact - first order|| / ||first order||.
  double first_order_mismatch = 0.0;
  /// Shape error against the target, after the best least-squares scale.
  std::optional<double> relative_error;

  /// Magnetization along the designed axis (-x), one value per slice.
  std::vector<double> profile() const;
};

/// Uncoupled single-spin simulation of the shaped pulse in every voxel.
/// Throws std::invalid_argument when the total flip angle exceeds pi.
ShapedEncodeResult shaped_encode(const ShapedPulse& pulse, const SliceLattice& lattice,
                                 const SpinSystem& sys,
                                 std::optional<std::span<const double>> target = std::nullopt);

/// Relative L2 shape error of `measured` against `target` after the best
/// least-squares scale factor.
double shape_error(std::span<const double> measured, std::span<const double> target);

enum class DecouplingMode { off, ideal, pulsed };

/// Carbon decoupling while the proton is encoded. `pulsed` is a train of
/// ideal pi pulses with at most `spacing` seconds between them and an even
/// count, so the toggled coupling averages to zero and carbon is restored.
struct Decoupling {
  DecouplingMode mode = DecouplingMode::ideal;
  double spacing = 0.0;
};

/// Applies the shaped pulse (and its refocusing lobe) to the proton of every
/// voxel with the full two-spin Hamiltonian. `voxels` holds one state per
/// voxel in lattice order.
std::vector<DensityMatrix> apply_shaped_pulse(std::span<const DensityMatrix> voxels,
                                              const ShapedPulse& pulse,
                                              const SliceLattice& lattice,
                                              const SpinSystem& sys, const Decoupling& decoupling);

struct DecoupledEncodeResult {
  std::vector<DensityMatrix> voxels;
  /// Slice-averaged normalized proton m_x + i m_y.
  std::vector<cplx> transverse;
};

/// Two-spin encoding from the pseudo-pure ground state.
DecoupledEncodeResult decoupled_encode(const ShapedPulse& pulse, const SliceLattice& lattice,
                                       const SpinSystem& sys, const Decoupling& decoupling);

/// Slice-averaged normalized m_x + i m_y of one spin.
std::vector<cplx> slice_transverse(std::span<const DensityMatrix> voxels,
                                   const SliceLattice& lattice, const SpinSystem& sys,
                                   Spin spin);

/// Applies a linear phase ramp across the waveform so the encoded profile
/// moves by `shift_slices` slices toward +z, wrapping around the lattice.
/// Throws std::invalid_argument unless |shift_slices| < n_slices.
ShapedPulse stream_by_frequency_shift(const ShapedPulse& pulse, int shift_slices,
                                      const SliceLattice& lattice, const SpinSystem& sys);

}  // namespace qlg::spin
