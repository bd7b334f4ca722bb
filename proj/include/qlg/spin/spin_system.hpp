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

#include "qlg/spin/operators.hpp"

namespace qlg::spin {

/// Heteronuclear two-spin system in the doubly rotating frame.
///
/// The default coupling of 215 Hz is the usual one-bond 13C-1H value for
/// chloroform; every delay scales with 1/J so results do not depend on it.
struct SpinSystem {
  double gamma_ratio = 3.977;     ///< gamma_H / gamma_C
  double gamma_proton = 2.6752e8; ///< rad s^-1 T^-1
  double j_hz = 215.0;
  double offset_proton_hz = 0.0;
  double offset_carbon_hz = 0.0;
  double epsilon = 1e-5;          ///< thermal polarization scale

  /// Throws std::invalid_argument unless J > 0, epsilon > 0 and the
  /// gyromagnetic values are positive.
  void validate() const;

  double gamma_carbon() const { return gamma_proton / gamma_ratio; }

  /// Polarization of the pseudo-pure state,
  /// epsilon * sqrt(3) / (4 sqrt(2)) * (1 + gamma_H / gamma_C).
  double pseudo_pure_polarization() const;
};

/// Internal Hamiltonian in rad/s:
///   -w_H/2 Z1 - w_C/2 Z2 + (pi J / 2) Z1 Z2
/// with w = 2 pi (offset + extra offset). The extra offsets carry the
/// position-dependent gradient term.
Mat4 internal_hamiltonian(const SpinSystem& sys, double extra_proton_hz = 0.0,
                          double extra_carbon_hz = 0.0);

/// High-temperature thermal state 1/4 + epsilon (gamma_H/gamma_C Z1 + Z2).
DensityMatrix thermal_state(const SpinSystem& sys);

/// Equalized magnetization 1/4 + epsilon/2 (1 + gamma_H/gamma_C)(Z1 + Z2).
DensityMatrix equalized_state(const SpinSystem& sys);

/// (1 - e')/4 * 1 + e' |00><00|, where e' is the pseudo-pure polarization.
DensityMatrix pseudo_pure_state(const SpinSystem& sys);

/// Pseudo-pure state whose deviation is |psi><psi| instead of |00><00|.
DensityMatrix pseudo_pure_state(const SpinSystem& sys, const Vec4& psi);

/// Tr(O rho) / e' for a traceless observable O: the expectation the
/// underlying pure state would return.
double normalized_expectation(const DensityMatrix& rho, const Mat4& traceless_observable,
                              const SpinSystem& sys);

}  // namespace qlg::spin
