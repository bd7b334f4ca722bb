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

#include "qlg/spin/readout.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlg::spin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<DensityMatrix> expand_to_voxels(std::span<const DensityMatrix> states,
                                            const SliceLattice& lattice) {
  if (states.size() == lattice.voxel_count()) return {states.begin(), states.end()};
  if (states.size() != lattice.n_slices) {
    throw std::invalid_argument("readout needs one state per slice or per voxel");
  }
  std::vector<DensityMatrix> out;
  out.reserve(lattice.voxel_count());
  for (std::size_t v = 0; v < lattice.voxel_count(); ++v) out.push_back(states[lattice.slice_of(v)]);
  return out;
}

Mat4 pulse_unitary(const RfPulse& pulse, const SpinSystem& sys) {
  if (pulse.instantaneous()) return on_spin(pulse.spin, rf_rotation(pulse.phase, pulse.angle));
  PulseSequence seq;
  seq.then(pulse);
  return sequence_unitary(seq, sys);
}

std::vector<double> direct_bins(std::span<const DensityMatrix> voxels,
                                const SliceLattice& lattice, const SpinSystem& sys) {
  const Mat4 z1 = on_spin(Spin::proton, pauli_z());
  std::vector<double> f(lattice.n_slices, 0.0);
  for (std::size_t v = 0; v < voxels.size(); ++v) {
    f[lattice.slice_of(v)] += 0.5 * (1.0 - normalized_expectation(voxels[v], z1, sys));
  }
  for (auto& x : f) x /= static_cast<double>(lattice.spins_per_slice);
  return f;
}

std::vector<double> spectral_bins(std::span<const DensityMatrix> voxels,
                                  const SliceLattice& lattice, const SpinSystem& sys,
                                  const ReadoutOptions& options) {
  const std::size_t count = lattice.voxel_count();
  const double spacing = lattice.slice_spacing_hz(sys, Spin::proton);
  const double delta = spacing / static_cast<double>(lattice.spins_per_slice);
  const double dwell = 1.0 / (static_cast<double>(count) * delta);

  // Transverse magnetization after the readout pulse; the y-phase pi/2 turns
  // -<Z1> into <X1>.
  const Mat4 u = pulse_unitary({Spin::proton, phase::y, 0.5 * std::numbers::pi, options.nutation_hz}, sys);
  const Mat4 x1 = on_spin(Spin::proton, pauli_x());
  const Mat4 y1 = on_spin(Spin::proton, pauli_y());
  std::vector<cplx> m(count);
  std::vector<double> freq(count);
  for (std::size_t v = 0; v < count; ++v) {
    const DensityMatrix r = transform(voxels[v], u);
    m[v] = cplx(normalized_expectation(r, x1, sys), normalized_expectation(r, y1, sys));
    // Demodulated by the static offset and half a voxel spacing so every
    // line sits on a DFT bin.
    freq[v] = lattice.offset_hz(lattice.voxel_position(v), sys, Spin::proton) - 0.5 * delta;
  }

  std::vector<cplx> fid(count, cplx(0.0));
  for (std::size_t n = 0; n < count; ++n) {
    const double t = static_cast<double>(n) * dwell;
    const double decay = std::exp(-std::numbers::pi * options.linewidth_hz * t);
    for (std::size_t v = 0; v < count; ++v) fid[n] += m[v] * std::polar(decay, kTwoPi * freq[v] * t);
  }

  std::vector<double> f(lattice.n_slices, 0.0);
  std::vector<std::size_t> used(lattice.n_slices, 0);
  for (std::size_t k = 0; k < count; ++k) {
    const double nu = (static_cast<double>(k) - 0.5 * static_cast<double>(count)) * delta;
    cplx s(0.0);
    for (std::size_t n = 0; n < count; ++n) {
      s += fid[n] * std::polar(1.0, -kTwoPi * nu * static_cast<double>(n) * dwell);
    }
    s /= static_cast<double>(count);
    // Undo the demodulation to compare with the slice bands.
    const double line = nu + 0.5 * delta;
    for (std::size_t j = 0; j < lattice.n_slices; ++j) {
      const OffsetBand b = lattice.band(j, sys, Spin::proton, options.band_fraction);
      const double lo = b.low_hz - sys.offset_proton_hz;
      const double hi = b.high_hz - sys.offset_proton_hz;
      if (line >= lo && line < hi) {
        f[j] += 0.5 * (1.0 + s.real());
        ++used[j];
      }
    }
  }
  for (std::size_t j = 0; j < lattice.n_slices; ++j) {
    if (used[j] == 0) throw std::invalid_argument("readout band contains no spectral bins");
    f[j] /= static_cast<double>(used[j]);
  }
  return f;
}

}  // namespace

void ReadoutOptions::validate() const {
  if (!(band_fraction > 0.0)) throw std::invalid_argument("band fraction must be positive");
  if (band_fraction > 1.0) throw std::invalid_argument("readout bands overlap (band_fraction > 1)");
  if (!(linewidth_hz >= 0.0)) throw std::invalid_argument("linewidth must be non-negative");
  if (!(nutation_hz > 0.0)) throw std::invalid_argument("nutation rate must be positive");
}

std::vector<double> read_proton(std::span<const DensityMatrix> states, const SliceLattice& lattice,
                                const SpinSystem& sys, const ReadoutOptions& options) {
  lattice.validate();
  options.validate();
  const auto voxels = expand_to_voxels(states, lattice);
  if (options.binning == ReadoutBinning::direct) return direct_bins(voxels, lattice, sys);
  return spectral_bins(voxels, lattice, sys, options);
}

std::vector<OccupationPair> gradient_readout(std::span<const DensityMatrix> states,
                                             const SliceLattice& lattice, const SpinSystem& sys,
                                             const ReadoutOptions& options) {
  const auto f1 = read_proton(states, lattice, sys, options);
  Mat4 swap = swap_gate();
  if (std::isfinite(options.nutation_hz)) {
    swap = sequence_unitary(compile_swap(sys.j_hz, options.nutation_hz), sys);
  }
  std::vector<DensityMatrix> swapped;
  swapped.reserve(states.size());
  for (const auto& s : states) swapped.push_back(transform(s, swap));
  const auto f2 = read_proton(swapped, lattice, sys, options);
  std::vector<OccupationPair> out(f1.size());
  for (std::size_t j = 0; j < f1.size(); ++j) out[j] = {f1[j], f2[j]};
  return out;
}

}  // namespace qlg::spin
