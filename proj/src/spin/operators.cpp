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

#include "qlg/spin/operators.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qlg::spin {

Mat2 pauli_x() {
  Mat2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Mat2 pauli_y() {
  Mat2 m;
  m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
  return m;
}

Mat2 pauli_z() {
  Mat2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Mat4 on_spin(Spin spin, const Mat2& op) {
  const Mat2 id = Mat2::Identity();
  if (spin == Spin::proton) return Eigen::kroneckerProduct(op, id);
  return Eigen::kroneckerProduct(id, op);
}

Mat4 zz() { return Eigen::kroneckerProduct(pauli_z(), pauli_z()); }

bool is_hermitian(const Mat4& m, double tol) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool is_unitary(const Mat4& m, double tol) {
  return (m.adjoint() * m - Mat4::Identity()).cwiseAbs().maxCoeff() <= tol;
}

Mat4 expm_hermitian(const Mat4& h, double t) {
  if (!is_hermitian(h)) throw std::invalid_argument("expm_hermitian: Hamiltonian is not Hermitian");
  if (t == 0.0) return Mat4::Identity();
  const Eigen::SelfAdjointEigenSolver<Mat4> es(h);
  Eigen::Vector4cd phases;
  for (int i = 0; i < 4; ++i) phases[i] = std::polar(1.0, -es.eigenvalues()[i] * t);
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Mat2 rotation_propagator(double omega_x, double omega_y, double omega_z, double t) {
  const double norm = std::sqrt(omega_x * omega_x + omega_y * omega_y + omega_z * omega_z);
  if (norm == 0.0 || t == 0.0) return Mat2::Identity();
  const double half = 0.5 * norm * t;
  const double c = std::cos(half);
  const double s = std::sin(half) / norm;
  Mat2 u;
  u(0, 0) = cplx(c, -s * omega_z);
  u(0, 1) = cplx(-s * omega_y, -s * omega_x);
  u(1, 0) = cplx(s * omega_y, -s * omega_x);
  u(1, 1) = cplx(c, s * omega_z);
  return u;
}

Mat2 rf_rotation(double phase, double angle) {
  // exp(+i a/2 n.sigma) is exp(-i (omega . sigma / 2) t) with omega t = -a n.
  return rotation_propagator(-std::cos(phase) * angle, -std::sin(phase) * angle, 0.0, 1.0);
}

DensityMatrix::DensityMatrix(const Mat4& m) : m_(m) {
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kHermitianTolerance) {
    throw std::invalid_argument("density matrix is not Hermitian");
  }
  if (std::abs(m_.trace() - cplx(1.0, 0.0)) > kTraceTolerance) {
    throw std::invalid_argument("density matrix does not have unit trace");
  }
  const Eigen::SelfAdjointEigenSolver<Mat4> es(m_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPositivityTolerance) {
    throw std::invalid_argument("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::pure(const Vec4& psi) {
  const Vec4 v = psi / psi.norm();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed() { return DensityMatrix(0.25 * Mat4::Identity()); }

double DensityMatrix::expectation(const Mat4& observable) const {
  return (observable * m_).trace().real();
}

DensityMatrix transform(const DensityMatrix& rho, const Mat4& u) {
  Mat4 out = u * rho.matrix() * u.adjoint();
  // Re-symmetrize so repeated products do not drift off Hermitian.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(out);
}

DensityMatrix propagate(const DensityMatrix& rho, const Mat4& h, double t) {
  if (t < 0.0) throw std::invalid_argument("propagate: negative duration");
  return transform(rho, expm_hermitian(h, t));
}

DensityMatrix dephase(const DensityMatrix& rho, Spin spin) {
  const Mat4 z = on_spin(spin, pauli_z());
  return DensityMatrix(0.5 * (rho.matrix() + z * rho.matrix() * z));
}

}  // namespace qlg::spin
