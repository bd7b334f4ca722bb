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

#include "qlg/spin/slice_encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/LU>

#include "qlg/spin/pulse_sequence.hpp"

namespace qlg::spin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const cplx kI(0.0, 1.0);

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

// Angular offsets (rad/s) of a voxel during the pulse and during the
// reversed-gradient refocusing lobe.
struct VoxelOffsets {
  double pulse_h;
  double refocus_h;
  double pulse_c;
  double refocus_c;
};

VoxelOffsets voxel_offsets(std::size_t voxel, const SliceLattice& lattice, const SpinSystem& sys) {
  const double z = lattice.voxel_position(voxel);
  const double grad_h = lattice.offset_hz(z, sys, Spin::proton);
  const double grad_c = lattice.offset_hz(z, sys, Spin::carbon);
  return {kTwoPi * (sys.offset_proton_hz + grad_h), kTwoPi * (sys.offset_proton_hz - grad_h),
          kTwoPi * (sys.offset_carbon_hz + grad_c), kTwoPi * (sys.offset_carbon_hz - grad_c)};
}

// Linear response of m_+ to a unit sample a_n = w_y - i w_x in slot n.
cplx sample_response(std::size_t n, std::size_t count, double dt, double refocus,
                     double w_pulse, double w_refocus) {
  const double total = static_cast<double>(count) * dt;
  const double s0 = static_cast<double>(n) * dt;
  const double s1 = s0 + dt;
  cplx integral;
  if (std::abs(w_pulse) * dt < 1e-9) {
    integral = dt * std::exp(-kI * w_pulse * (total - 0.5 * (s0 + s1)));
  } else {
    integral = (std::exp(-kI * w_pulse * (total - s1)) - std::exp(-kI * w_pulse * (total - s0))) /
               (kI * w_pulse);
  }
  return -integral * std::exp(-kI * w_refocus * refocus);
}

Eigen::MatrixXcd response_matrix(const SliceLattice& lattice, const SpinSystem& sys,
                                 std::size_t samples, double dt, double refocus) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(lattice.n_slices),
                                              static_cast<Eigen::Index>(samples));
  const double per = 1.0 / static_cast<double>(lattice.spins_per_slice);
  for (std::size_t v = 0; v < lattice.voxel_count(); ++v) {
    const auto off = voxel_offsets(v, lattice, sys);
    const auto row = static_cast<Eigen::Index>(lattice.slice_of(v));
    for (std::size_t n = 0; n < samples; ++n) {
      a(row, static_cast<Eigen::Index>(n)) +=
          per * sample_response(n, samples, dt, refocus, off.pulse_h, off.refocus_h);
    }
  }
  return a;
}

// Wavenumber (rad/m) of sample n after refocusing.
double sample_wavenumber(std::size_t n, std::size_t count, double length) {
  return (static_cast<double>(n) - 0.5 * static_cast<double>(count)) * kTwoPi / length;
}

std::vector<cplx> average_by_slice(const std::vector<cplx>& per_voxel, const SliceLattice& lattice) {
  std::vector<cplx> out(lattice.n_slices, cplx(0.0));
  for (std::size_t v = 0; v < per_voxel.size(); ++v) out[lattice.slice_of(v)] += per_voxel[v];
  for (auto& x : out) x /= static_cast<double>(lattice.spins_per_slice);
  return out;
}

}  // namespace

void SliceLattice::validate() const {
  if (n_slices < 2) throw std::invalid_argument("slice lattice needs at least 2 slices");
  if (spins_per_slice < 1) throw std::invalid_argument("spins_per_slice must be positive");
  if (!(slice_width > 0.0)) throw std::invalid_argument("slice width must be positive");
  if (!(gradient > 0.0)) throw std::invalid_argument("gradient strength must be positive");
}

double SliceLattice::slice_center(std::size_t slice) const {
  return (static_cast<double>(slice) + 0.5 - 0.5 * static_cast<double>(n_slices)) * slice_width;
}

double SliceLattice::voxel_position(std::size_t voxel) const {
  const double sub = slice_width / static_cast<double>(spins_per_slice);
  return (static_cast<double>(voxel) + 0.5 - 0.5 * static_cast<double>(voxel_count())) * sub;
}

double SliceLattice::offset_hz(double z, const SpinSystem& sys, Spin spin) const {
  const double gamma = spin == Spin::proton ? sys.gamma_proton : sys.gamma_carbon();
  return gamma * gradient * z / kTwoPi;
}

double SliceLattice::slice_spacing_hz(const SpinSystem& sys, Spin spin) const {
  return offset_hz(slice_width, sys, spin);
}

OffsetBand SliceLattice::band(std::size_t slice, const SpinSystem& sys, Spin spin,
                              double fraction) const {
  const double spin_offset = spin == Spin::proton ? sys.offset_proton_hz : sys.offset_carbon_hz;
  const double center = spin_offset + offset_hz(slice_center(slice), sys, spin);
  const double half = 0.5 * fraction * slice_spacing_hz(sys, spin);
  return {center - half, center + half};
}

void ShapedPulse::validate() const {
  if (samples.empty()) throw std::invalid_argument("shaped pulse needs at least one sample");
  if (!(sample_period > 0.0)) throw std::invalid_argument("sample period must be positive");
  for (const auto& s : samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw std::invalid_argument("shaped pulse sample is not finite");
    }
  }
}

double ShapedPulse::refocus_duration() const {
  return (0.5 * static_cast<double>(samples.size()) - 0.5) * sample_period;
}

double ShapedPulse::total_flip_angle() const {
  double sum = 0.0;
  for (const auto& s : samples) sum += std::abs(s);
  return sum * sample_period;
}

ShapedPulse design_shaped_pulse(std::span<const double> tip_angles, const SliceLattice& lattice,
                                const SpinSystem& sys) {
  lattice.validate();
  if (tip_angles.size() != lattice.n_slices) {
    throw std::invalid_argument("design_shaped_pulse: one tip angle per slice required");
  }
  const std::size_t count = lattice.n_slices;
  ShapedPulse pulse;
  // One k-space step per sample equal to 2 pi / L keeps the profile periodic
  // over the lattice.
  pulse.sample_period = 1.0 / (static_cast<double>(count) * lattice.slice_spacing_hz(sys));
  pulse.samples.assign(count, cplx(0.0));
  const Eigen::MatrixXcd a =
      response_matrix(lattice, sys, count, pulse.sample_period, pulse.refocus_duration());
  Eigen::VectorXcd rhs(static_cast<Eigen::Index>(count));
  for (std::size_t j = 0; j < count; ++j) {
    rhs[static_cast<Eigen::Index>(j)] = -tip_angles[j];  // tip toward -x
  }
  const Eigen::VectorXcd amp = a.partialPivLu().solve(rhs);
  for (std::size_t n = 0; n < count; ++n) {
    pulse.samples[n] = std::conj(amp[static_cast<Eigen::Index>(n)]);
  }
  return pulse;
}

ShapedPulse design_profile_pulse(std::span<const double> profile, double peak_flip,
                                 const SliceLattice& lattice, const SpinSystem& sys) {
  double peak = 0.0;
  for (double v : profile) peak = std::max(peak, std::abs(v));
  std::vector<double> tips(profile.size(), 0.0);
  if (peak > 0.0) {
    for (std::size_t j = 0; j < profile.size(); ++j) tips[j] = peak_flip * profile[j] / peak;
  }
  return design_shaped_pulse(tips, lattice, sys);
}

ShapedPulse calibrate_amplitude(const ShapedPulse& pulse, std::span<const double> tip_angles,
                                const SliceLattice& lattice, const SpinSystem& sys,
                                int iterations) {
  double want = 0.0;
  for (double b : tip_angles) want += std::sin(b);
  if (!(want > 0.0)) return pulse;
  ShapedPulse out = pulse;
  for (int it = 0; it < iterations; ++it) {
    const auto got = shaped_encode(out, lattice, sys).profile();
    double area = 0.0;
    for (double g : got) area += g;
    if (!(area > 0.0)) break;
    for (auto& s : out.samples) s *= want / area;
  }
  return out;
}

std::vector<cplx> first_order_profile(const ShapedPulse& pulse, const SliceLattice& lattice,
                                      const SpinSystem& sys) {
  pulse.validate();
  lattice.validate();
  const std::size_t count = pulse.samples.size();
  const Eigen::MatrixXcd a =
      response_matrix(lattice, sys, count, pulse.sample_period, pulse.refocus_duration());
  Eigen::VectorXcd amp(static_cast<Eigen::Index>(count));
  for (std::size_t n = 0; n < count; ++n) {
    amp[static_cast<Eigen::Index>(n)] = std::conj(pulse.samples[n]);
  }
  const Eigen::VectorXcd m = a * amp;
  return {m.data(), m.data() + m.size()};
}

std::vector<double> ShapedEncodeResult::profile() const {
  std::vector<double> out(transverse.size());
  for (std::size_t j = 0; j < transverse.size(); ++j) out[j] = -transverse[j].real();
  return out;
}

double shape_error(std::span<const double> measured, std::span<const double> target) {
  if (measured.size() != target.size()) throw std::invalid_argument("shape_error: length mismatch");
  double mt = 0.0;
  double mm = 0.0;
  double tt = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    mt += measured[j] * target[j];
    mm += measured[j] * measured[j];
    tt += target[j] * target[j];
  }
  if (tt == 0.0) return mm == 0.0 ? 0.0 : 1.0;
  const double scale = mm > 0.0 ? mt / mm : 0.0;
  double err = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const double d = scale * measured[j] - target[j];
    err += d * d;
  }
  return std::sqrt(err / tt);
}

ShapedEncodeResult shaped_encode(const ShapedPulse& pulse, const SliceLattice& lattice,
                                 const SpinSystem& sys,
                                 std::optional<std::span<const double>> target) {
  pulse.validate();
  lattice.validate();
  if (pulse.total_flip_angle() > std::numbers::pi) {
    throw std::invalid_argument("shaped pulse flip angle exceeds pi; small-angle encoding invalid");
  }
  const std::size_t voxels = lattice.voxel_count();
  const double dt = pulse.sample_period;
  const double refocus = pulse.refocus_duration();
  std::vector<cplx> per_voxel(voxels);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t vi = 0; vi < static_cast<std::ptrdiff_t>(voxels); ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    const auto off = voxel_offsets(v, lattice, sys);
    Mat2 u = Mat2::Identity();
    for (const auto& s : pulse.samples) {
      // H = -1/2 (w_x X + w_y Y + w Z) = 1/2 Omega . sigma
      u = rotation_propagator(-s.imag(), -s.real(), -off.pulse_h, dt) * u;
    }
    u = rotation_propagator(0.0, 0.0, -off.refocus_h, refocus) * u;
    const cplx c0 = u(0, 0);
    const cplx c1 = u(1, 0);
    per_voxel[v] = 2.0 * std::conj(c0) * c1;
  }

  ShapedEncodeResult result;
  result.transverse = average_by_slice(per_voxel, lattice);
  result.first_order = first_order_profile(pulse, lattice, sys);
  std::vector<cplx> diff(result.transverse.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = result.transverse[j] - result.first_order[j];
  const double ref = norm2(result.first_order);
  result.first_order_mismatch = ref > 0.0 ? norm2(diff) / ref : norm2(diff);
  if (target) {
    if (target->size() != lattice.n_slices) {
      throw std::invalid_argument("shaped_encode: target length does not match slices");
    }
    result.relative_error = shape_error(result.profile(), *target);
  }
  return result;
}

std::vector<DensityMatrix> apply_shaped_pulse(std::span<const DensityMatrix> voxels,
                                              const ShapedPulse& pulse,
                                              const SliceLattice& lattice,
                                              const SpinSystem& sys,
                                              const Decoupling& decoupling) {
  pulse.validate();
  lattice.validate();
  if (voxels.size() != lattice.voxel_count()) {
    throw std::invalid_argument("apply_shaped_pulse: one state per voxel required");
  }
  const double dt = pulse.sample_period;
  const double t_pulse = pulse.duration();
  const double t_total = t_pulse + pulse.refocus_duration();

  std::vector<double> cuts;
  for (std::size_t n = 0; n <= pulse.samples.size(); ++n) cuts.push_back(static_cast<double>(n) * dt);
  cuts.push_back(t_total);
  std::vector<double> flips;
  if (decoupling.mode == DecouplingMode::pulsed) {
    if (!(decoupling.spacing > 0.0)) throw std::invalid_argument("decoupling spacing must be positive");
    const auto pairs = static_cast<std::size_t>(std::ceil(t_total / (2.0 * decoupling.spacing)));
    const double tau = t_total / (2.0 * static_cast<double>(pairs));
    for (std::size_t k = 0; k < 2 * pairs; ++k) flips.push_back((static_cast<double>(k) + 0.5) * tau);
    cuts.insert(cuts.end(), flips.begin(), flips.end());
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  SpinSystem active = sys;
  if (decoupling.mode == DecouplingMode::ideal) active.j_hz = 0.0;
  const Mat4 sx1 = on_spin(Spin::proton, pauli_x());
  const Mat4 sy1 = on_spin(Spin::proton, pauli_y());
  const Mat4 pi_carbon = on_spin(Spin::carbon, rf_rotation(phase::x, std::numbers::pi));

  std::vector<DensityMatrix> out(voxels.begin(), voxels.end());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t vi = 0; vi < static_cast<std::ptrdiff_t>(voxels.size()); ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    const double z = lattice.voxel_position(v);
    const double gh = lattice.offset_hz(z, sys, Spin::proton);
    const double gc = lattice.offset_hz(z, sys, Spin::carbon);
    Mat4 u = Mat4::Identity();
    std::size_t next_flip = 0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double t0 = cuts[k];
      const double t1 = cuts[k + 1];
      while (next_flip < flips.size() && flips[next_flip] <= t0) {
        u = pi_carbon * u;
        ++next_flip;
      }
      const double mid = 0.5 * (t0 + t1);
      Mat4 h;
      if (mid < t_pulse) {
        const auto n = std::min(static_cast<std::size_t>(mid / dt), pulse.samples.size() - 1);
        const cplx s = pulse.samples[n];
        h = internal_hamiltonian(active, gh, gc) - 0.5 * (s.imag() * sx1 + s.real() * sy1);
      } else {
        h = internal_hamiltonian(active, -gh, -gc);
      }
      u = expm_hermitian(h, t1 - t0) * u;
    }
    while (next_flip < flips.size()) {
      u = pi_carbon * u;
      ++next_flip;
    }
    out[v] = transform(voxels[v], u);
  }
  return out;
}

std::vector<cplx> slice_transverse(std::span<const DensityMatrix> voxels,
                                   const SliceLattice& lattice, const SpinSystem& sys,
                                   Spin spin) {
  const Mat4 sx = on_spin(spin, pauli_x());
  const Mat4 sy = on_spin(spin, pauli_y());
  std::vector<cplx> per_voxel(voxels.size());
  for (std::size_t v = 0; v < voxels.size(); ++v) {
    per_voxel[v] = cplx(normalized_expectation(voxels[v], sx, sys),
                        normalized_expectation(voxels[v], sy, sys));
  }
  return average_by_slice(per_voxel, lattice);
}

DecoupledEncodeResult decoupled_encode(const ShapedPulse& pulse, const SliceLattice& lattice,
                                       const SpinSystem& sys, const Decoupling& decoupling) {
  const std::vector<DensityMatrix> start(lattice.voxel_count(), pseudo_pure_state(sys));
  DecoupledEncodeResult result;
  result.voxels = apply_shaped_pulse(start, pulse, lattice, sys, decoupling);
  result.transverse = slice_transverse(result.voxels, lattice, sys, Spin::proton);
  return result;
}

ShapedPulse stream_by_frequency_shift(const ShapedPulse& pulse, int shift_slices,
                                      const SliceLattice& lattice, const SpinSystem& sys) {
  pulse.validate();
  lattice.validate();
  if (static_cast<std::size_t>(std::abs(shift_slices)) >= lattice.n_slices) {
    throw std::invalid_argument("frequency shift must be smaller than the lattice");
  }
  ShapedPulse out = pulse;
  const double dz = static_cast<double>(shift_slices) * lattice.slice_width;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    const double k = sample_wavenumber(n, out.samples.size(), lattice.length());
    out.samples[n] *= std::polar(1.0, k * dz);
  }
  out.frequency_shift_hz += static_cast<double>(shift_slices) * lattice.slice_spacing_hz(sys);
  return out;
}

}  // namespace qlg::spin
