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

#include "qlg/spin/spin_system.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qlg::spin {

void SpinSystem::validate() const {
  if (!(j_hz > 0.0)) throw std::invalid_argument("scalar coupling J must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("polarization epsilon must be positive");
  if (!(gamma_ratio > 0.0) || !(gamma_proton > 0.0)) {
    throw std::invalid_argument("gyromagnetic ratios must be positive");
  }
}

double SpinSystem::pseudo_pure_polarization() const {
  return epsilon * std::sqrt(3.0) / (4.0 * std::sqrt(2.0)) * (1.0 + gamma_ratio);
}

Mat4 internal_hamiltonian(const SpinSystem& sys, double extra_proton_hz,
                          double extra_carbon_hz) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double w_h = two_pi * (sys.offset_proton_hz + extra_proton_hz);
  const double w_c = two_pi * (sys.offset_carbon_hz + extra_carbon_hz);
  const double coupling = 0.5 * std::numbers::pi * sys.j_hz;
  // Diagonal in the computational basis; entries in (00, 01, 10, 11) order.
  Mat4 h = Mat4::Zero();
  const double z1[4] = {1.0, 1.0, -1.0, -1.0};
  const double z2[4] = {1.0, -1.0, 1.0, -1.0};
  for (int i = 0; i < 4; ++i) {
    h(i, i) = -0.5 * w_h * z1[i] - 0.5 * w_c * z2[i] + coupling * z1[i] * z2[i];
  }
  return h;
}

DensityMatrix thermal_state(const SpinSystem& sys) {
  sys.validate();
  const Mat4 m = 0.25 * Mat4::Identity() +
                 sys.epsilon * (sys.gamma_ratio * on_spin(Spin::proton, pauli_z()) +
                                on_spin(Spin::carbon, pauli_z()));
  return DensityMatrix(m);
}

DensityMatrix equalized_state(const SpinSystem& sys) {
  sys.validate();
  const Mat4 m = 0.25 * Mat4::Identity() +
                 0.5 * sys.epsilon * (1.0 + sys.gamma_ratio) *
                     (on_spin(Spin::proton, pauli_z()) + on_spin(Spin::carbon, pauli_z()));
  return DensityMatrix(m);
}

DensityMatrix pseudo_pure_state(const SpinSystem& sys) {
  Vec4 ground = Vec4::Zero();
  ground[0] = 1.0;
  return pseudo_pure_state(sys, ground);
}

DensityMatrix pseudo_pure_state(const SpinSystem& sys, const Vec4& psi) {
  sys.validate();
  const double ep = sys.pseudo_pure_polarization();
  const Vec4 v = psi / psi.norm();
  return DensityMatrix(0.25 * (1.0 - ep) * Mat4::Identity() + ep * v * v.adjoint());
}

double normalized_expectation(const DensityMatrix& rho, const Mat4& traceless_observable,
                              const SpinSystem& sys) {
  return rho.expectation(traceless_observable) / sys.pseudo_pure_polarization();
}

}  // namespace qlg::spin
