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

#include "qlg/spin/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qlg/spin/pulse_sequence.hpp"

namespace qlg::spin {

namespace {

Mat4 hard_pulse(Spin spin, double phase, double angle, double nutation_hz, const SpinSystem& sys) {
  const RfPulse pulse{spin, phase, angle, nutation_hz};
  if (pulse.instantaneous()) return on_spin(spin, rf_rotation(phase, angle));
  PulseSequence seq;
  seq.then(pulse);
  return sequence_unitary(seq, sys);
}

// Rotation |0> -> cos(b/2)|0> + sin(b/2)|1> on the proton.
Mat4 proton_tip(double beta) { return on_spin(Spin::proton, rf_rotation(phase::minus_y, beta)); }

double clamp_unit(double f, std::size_t& count) {
  if (f < 0.0 || f > 1.0) ++count;
  return std::clamp(f, 0.0, 1.0);
}

struct Gates {
  Mat4 collision;
  Mat4 swap;
  Mat4 half_pi;  // pi/2 about y on the proton
};

Gates build_gates(const ExperimentConfig& cfg) {
  const double nu = cfg.nutation_hz();
  Gates g;
  if (std::isfinite(nu)) {
    g.collision = sequence_unitary(compile_collision(cfg.system.j_hz, nu), cfg.system);
    g.swap = sequence_unitary(compile_swap(cfg.system.j_hz, nu), cfg.system);
  } else {
    g.collision = sqrt_swap_gate();
    g.swap = swap_gate();
  }
  g.half_pi = hard_pulse(Spin::proton, phase::y, 0.5 * std::numbers::pi, nu, cfg.system);
  return g;
}

double encoding_rms(const std::vector<OccupationPair>& got, const std::vector<OccupationPair>& want) {
  double sum = 0.0;
  for (std::size_t j = 0; j < got.size(); ++j) {
    sum += std::pow(got[j].f1 - want[j].f1, 2) + std::pow(got[j].f2 - want[j].f2, 2);
  }
  return std::sqrt(sum / (2.0 * static_cast<double>(got.size())));
}

std::vector<OccupationPair> direct_occupations(std::span<const DensityMatrix> states,
                                               const SpinSystem& sys) {
  const Mat4 z1 = on_spin(Spin::proton, pauli_z());
  const Mat4 z2 = on_spin(Spin::carbon, pauli_z());
  std::vector<OccupationPair> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    out[i] = {0.5 * (1.0 - normalized_expectation(states[i], z1, sys)),
              0.5 * (1.0 - normalized_expectation(states[i], z2, sys))};
  }
  return out;
}

std::vector<OccupationPair> slice_average(const std::vector<OccupationPair>& voxels,
                                          const SliceLattice& lattice) {
  std::vector<OccupationPair> out(lattice.n_slices);
  const double w = 1.0 / static_cast<double>(lattice.spins_per_slice);
  for (std::size_t v = 0; v < voxels.size(); ++v) {
    out[lattice.slice_of(v)].f1 += w * voxels[v].f1;
    out[lattice.slice_of(v)].f2 += w * voxels[v].f2;
  }
  return out;
}

class ReadoutNoise {
 public:
  ReadoutNoise(double sigma, std::uint64_t seed) : sigma_(sigma), rng_(seed) {}
  void apply(std::vector<OccupationPair>& pairs) {
    if (sigma_ == 0.0) return;
    std::normal_distribution<double> dist(0.0, sigma_);
    for (auto& p : pairs) {
      p.f1 += dist(rng_);
      p.f2 += dist(rng_);
    }
  }

 private:
  double sigma_;
  std::mt19937_64 rng_;
};

// Exact encoding: each slice gets the node state through ideal tips and the
// compiled swap.
std::vector<DensityMatrix> encode_exact(const std::vector<OccupationPair>& pairs,
                                        const ExperimentConfig& cfg, const Gates& gates) {
  const DensityMatrix ground = pseudo_pure_state(cfg.system);
  std::vector<DensityMatrix> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    const double b1 = 2.0 * std::asin(std::sqrt(p.f1));
    const double b2 = 2.0 * std::asin(std::sqrt(p.f2));
    out.push_back(transform(ground, proton_tip(b1) * gates.swap * proton_tip(b2)));
  }
  return out;
}

struct ShapedPlan {
  ShapedPulse pulse1;
  ShapedPulse pulse2;
  double scale = 1.0;
};

double plan_scale(const std::vector<OccupationPair>& pairs) {
  double s = 0.0;
  for (const auto& p : pairs) s = std::max({s, p.f1, p.f2});
  return s > 0.0 ? s : 1.0;
}

std::vector<double> tip_angles(const std::vector<double>& f, double scale, double flip_angle) {
  const double peak = std::sin(flip_angle);
  std::vector<double> tips(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    // Predistort so the z-magnetization left after the flip-back is linear
    // in the target.
    tips[j] = std::asin(std::clamp(peak * f[j] / scale, -1.0, 1.0));
  }
  return tips;
}

// Designs from `source`, moves the profile by `shift` slices and calibrates
// the amplitude against `target`, the classically streamed source.
ShapedPulse plan_pulse(const std::vector<double>& source, const std::vector<double>& target,
                       int shift, double scale, const ExperimentConfig& cfg) {
  ShapedPulse pulse =
      design_shaped_pulse(tip_angles(source, scale, cfg.flip_angle), cfg.lattice, cfg.system);
  if (shift != 0) pulse = stream_by_frequency_shift(pulse, shift, cfg.lattice, cfg.system);
  return calibrate_amplitude(pulse, tip_angles(target, scale, cfg.flip_angle), cfg.lattice,
                             cfg.system);
}

ShapedPlan plan_shaped(const std::vector<OccupationPair>& source,
                       const std::vector<OccupationPair>& target, const ExperimentConfig& cfg,
                       int shift1, int shift2) {
  ShapedPlan plan;
  plan.scale = plan_scale(target);
  std::vector<double> s1(source.size()), s2(source.size()), t1(source.size()), t2(source.size());
  for (std::size_t j = 0; j < source.size(); ++j) {
    s1[j] = source[j].f1;
    s2[j] = source[j].f2;
    t1[j] = target[j].f1;
    t2[j] = target[j].f2;
  }
  plan.pulse1 = plan_pulse(s1, t1, shift1, plan.scale, cfg);
  plan.pulse2 = plan_pulse(s2, t2, shift2, plan.scale, cfg);
  return plan;
}

std::vector<DensityMatrix> encode_shaped(const ShapedPlan& plan, const ExperimentConfig& cfg,
                                         const Gates& gates) {
  Decoupling dec = cfg.decoupling;
  if (dec.mode == DecouplingMode::pulsed) dec.spacing = cfg.decoupling_spacing();
  std::vector<DensityMatrix> voxels(cfg.lattice.voxel_count(), pseudo_pure_state(cfg.system));

  voxels = apply_shaped_pulse(voxels, plan.pulse2, cfg.lattice, cfg.system, dec);
  for (auto& v : voxels) v = dephase(transform(v, gates.half_pi), Spin::proton);
  for (auto& v : voxels) {
    v = transform(v, gates.swap);
    v = dephase(dephase(v, Spin::proton), Spin::carbon);
  }
  voxels = apply_shaped_pulse(voxels, plan.pulse1, cfg.lattice, cfg.system, dec);
  for (auto& v : voxels) {
    v = transform(v, gates.half_pi);
    v = dephase(dephase(v, Spin::proton), Spin::carbon);
  }
  return voxels;
}

// Maps a physical occupation in [1/2, 1) back to the encoded value.
double decode(double f_phys, double scale, double flip_angle) {
  return scale * (2.0 * f_phys - 1.0) / std::sin(flip_angle);
}

}  // namespace

void ExperimentConfig::validate() const {
  system.validate();
  lattice.validate();
  readout.validate();
  if (initial_density.size() != lattice.n_slices) {
    throw std::invalid_argument("initial density needs one value per slice");
  }
  for (double r : initial_density) {
    if (!(r >= 0.0 && r <= 2.0)) throw std::invalid_argument("initial density outside [0, 2]");
  }
  if (!(nutation_ratio > 0.0)) throw std::invalid_argument("nutation ratio must be positive");
  if (!(flip_angle > 0.0 && flip_angle <= 0.5 * std::numbers::pi)) {
    throw std::invalid_argument("flip angle must lie in (0, pi/2]");
  }
  if (!(decoupling.spacing >= 0.0)) throw std::invalid_argument("decoupling spacing is negative");
  if (!(readout_noise >= 0.0)) throw std::invalid_argument("readout noise is negative");
}

double ExperimentConfig::nutation_hz() const {
  return rotations == RotationMode::ideal ? kIdealNutation : nutation_ratio * system.j_hz;
}

double ExperimentConfig::decoupling_spacing() const {
  return decoupling.spacing > 0.0 ? decoupling.spacing : 1.0 / (50.0 * system.j_hz);
}

ExperimentConfig ExperimentConfig::ideal(const MassDensityField& rho0, std::size_t steps) {
  ExperimentConfig cfg;
  cfg.lattice.n_slices = rho0.size();
  cfg.initial_density = rho0;
  cfg.steps = steps;
  return cfg;
}

ExperimentConfig ExperimentConfig::realistic(const MassDensityField& rho0, std::size_t steps) {
  ExperimentConfig cfg = ideal(rho0, steps);
  cfg.rotations = RotationMode::finite_power;
  cfg.nutation_ratio = 50.0;
  cfg.encoding = EncodingMode::shaped;
  cfg.flip_angle = 0.25 * std::numbers::pi;
  cfg.decoupling = {DecouplingMode::pulsed, 0.0};
  cfg.readout.binning = ReadoutBinning::spectral;
  return cfg;
}

ExperimentResult simulate_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Gates gates = build_gates(cfg);
  ReadoutOptions readout = cfg.readout;
  readout.nutation_hz = cfg.nutation_hz();
  ReadoutNoise noise(cfg.readout_noise, cfg.seed);
  const LatticeConfig sites{cfg.lattice.n_slices, 1.0, 1.0};

  ExperimentResult result;
  result.collision_fidelity = gate_fidelity(gates.collision, sqrt_swap_gate());
  result.swap_fidelity = gate_fidelity(gates.swap, swap_gate());

  std::vector<OccupationPair> pairs = init_equilibrium(cfg.initial_density);
  result.densities.push_back(densities(pairs));
  // Unstreamed values read in the previous step; the shaped pulses are
  // designed from these and moved by frequency shifts.
  std::vector<OccupationPair> read_back = pairs;
  bool shifted = false;

  for (std::size_t t = 0; t < cfg.steps; ++t) {
    result.occupations.push_back(pairs);
    StepDiagnostics diag;
    std::vector<DensityMatrix> states;
    double scale = 1.0;

    if (cfg.encoding == EncodingMode::exact) {
      states = encode_exact(pairs, cfg, gates);
      diag.encoding_error = encoding_rms(direct_occupations(states, cfg.system), pairs);
    } else {
      const ShapedPlan plan = shifted ? plan_shaped(read_back, pairs, cfg, +1, -1)
                                         : plan_shaped(pairs, pairs, cfg, 0, 0);
      scale = plan.scale;
      states = encode_shaped(plan, cfg, gates);
      auto encoded = slice_average(direct_occupations(states, cfg.system), cfg.lattice);
      for (auto& p : encoded) p = {decode(p.f1, scale, cfg.flip_angle), decode(p.f2, scale, cfg.flip_angle)};
      diag.encoding_error = encoding_rms(encoded, pairs);
    }

    for (auto& s : states) s = transform(s, gates.collision);
    std::vector<OccupationPair> measured = gradient_readout(states, cfg.lattice, cfg.system, readout);
    noise.apply(measured);

    for (auto& p : measured) {
      if (cfg.encoding == EncodingMode::exact) {
        p = {clamp_unit(p.f1, diag.out_of_range), clamp_unit(p.f2, diag.out_of_range)};
      } else {
        p = {decode(p.f1, scale, cfg.flip_angle), decode(p.f2, scale, cfg.flip_angle)};
        diag.out_of_range += static_cast<std::size_t>(!p.valid() ? 1 : 0);
      }
    }
    read_back = measured;
    shifted = true;
    pairs = stream(measured, sites);
    const MassDensityField rho = densities(pairs);
    diag.mass = 0.0;
    for (double r : rho) diag.mass += r;
    result.densities.push_back(rho);
    result.diagnostics.push_back(diag);
  }
  result.occupations.push_back(pairs);
  return result;
}

}  // namespace qlg::spin
