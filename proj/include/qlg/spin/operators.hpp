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

#include <complex>

#include <Eigen/Dense>

namespace qlg::spin {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;
using Vec4 = Eigen::Vector4cd;

/// Spin 1 (proton) is the left tensor slot, spin 2 (carbon) the right.
enum class Spin { proton = 0, carbon = 1 };

// Pauli matrices with sigma_z |0> = +|0>.
Mat2 pauli_x();
Mat2 pauli_y();
Mat2 pauli_z();

/// Embeds a single-spin operator into the two-spin space.
Mat4 on_spin(Spin spin, const Mat2& op);

/// sigma_z (x) sigma_z.
Mat4 zz();

bool is_hermitian(const Mat4& m, double tol = 1e-12);
bool is_unitary(const Mat4& m, double tol = 1e-10);

/// exp(-i H t) for Hermitian H via eigendecomposition.
/// Throws std::invalid_argument if H is not Hermitian.
Mat4 expm_hermitian(const Mat4& h, double t);

/// exp(-i (omega . sigma / 2) t) for a single spin, closed form.
Mat2 rotation_propagator(double omega_x, double omega_y, double omega_z, double t);

/// Rotation by `angle` about the transverse axis at `phase` from +x, in the
/// form exp(+i angle/2 (cos phase sigma_x + sin phase sigma_y)) produced by
/// a resonant RF pulse.
Mat2 rf_rotation(double phase, double angle);

/// Ensemble state of one two-spin voxel.
class DensityMatrix {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-12;
  static constexpr double kPositivityTolerance = 1e-10;

  /// Throws std::invalid_argument unless Hermitian, unit trace and
  /// positive semidefinite within the class tolerances.
  explicit DensityMatrix(const Mat4& m);

  static DensityMatrix pure(const Vec4& psi);
  static DensityMatrix maximally_mixed();

  const Mat4& matrix() const { return m_; }
  cplx trace() const { return m_.trace(); }
  double expectation(const Mat4& observable) const;

 private:
  Mat4 m_;
};

/// U rho U^dagger.
DensityMatrix transform(const DensityMatrix& rho, const Mat4& u);

/// Unitary evolution under a time-independent Hamiltonian (rad/s).
/// Throws std::invalid_argument for a non-Hermitian H or negative t.
DensityMatrix propagate(const DensityMatrix& rho, const Mat4& h, double t);

/// Removes the transverse coherence of one spin, the ensemble average of a
/// strong gradient crusher: rho -> (rho + Z rho Z) / 2.
DensityMatrix dephase(const DensityMatrix& rho, Spin spin);

}  // namespace qlg::spin
