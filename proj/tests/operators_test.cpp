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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "qlg/spin/operators.hpp"
#include "qlg/spin/spin_system.hpp"

using namespace qlg::spin;

namespace {

const cplx kI(0.0, 1.0);

Mat4 random_hermitian(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  Mat4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = cplx(n(rng), n(rng));
  return 0.5 * (a + a.adjoint());
}

// Direct matrix-exponential oracle.
Mat4 expm_oracle(const Mat4& h, double t) { return Mat4((-kI * t * h).exp()); }

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("pauli algebra and tensor ordering") {
  const Mat2 x = pauli_x(), y = pauli_y(), z = pauli_z();
  CHECK((x * y - kI * z).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(z(0, 0) == cplx(1.0));
  const Mat4 z1 = on_spin(Spin::proton, z);
  const Mat4 z2 = on_spin(Spin::carbon, z);
  // (|00>, |01>, |10>, |11>) with the proton on the left.
  CHECK(z1(1, 1) == cplx(1.0));
  CHECK(z1(2, 2) == cplx(-1.0));
  CHECK(z2(1, 1) == cplx(-1.0));
  CHECK(max_abs(zz() - z1 * z2) < 1e-15);
}

TEST_CASE("expm_hermitian matches the matrix exponential") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Mat4 h = random_hermitian(rng, 100.0);
    const double t = 0.003 * (k + 1);
    CHECK(max_abs(expm_hermitian(h, t) - expm_oracle(h, t)) < 1e-10);
  }
  Mat4 bad = Mat4::Zero();
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(expm_hermitian(bad, 1.0), std::invalid_argument);
}

TEST_CASE("single-spin propagators") {
  const Mat2 u = rotation_propagator(3.0, -1.0, 2.0, 0.7);
  const Mat2 h = 0.5 * (3.0 * pauli_x() - 1.0 * pauli_y() + 2.0 * pauli_z());
  CHECK((u - Mat2((-kI * 0.7 * h).exp())).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((rotation_propagator(0, 0, 0, 1.0) - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-15);

  // A pi rotation about x flips |0> to |1> up to phase.
  const Mat2 flip = rf_rotation(0.0, std::numbers::pi);
  CHECK(std::abs(std::abs(flip(1, 0)) - 1.0) < 1e-15);
  // exp(+i angle/2 (cos phase X + sin phase Y))
  const double ph = 0.3, ang = 1.1;
  const Mat2 g = (std::cos(ph) * pauli_x() + std::sin(ph) * pauli_y());
  CHECK((rf_rotation(ph, ang) - Mat2((kI * 0.5 * ang * g).exp())).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix::maximally_mixed());
  Mat4 m = 0.25 * Mat4::Identity();
  m(0, 0) += 1e-9;
  CHECK_THROWS_AS(DensityMatrix{m}, std::invalid_argument);
  Mat4 nh = 0.25 * Mat4::Identity();
  nh(0, 1) = 0.01;
  CHECK_THROWS_AS(DensityMatrix{nh}, std::invalid_argument);
  Mat4 neg = Mat4::Zero();
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix{neg}, std::invalid_argument);
  Vec4 psi = Vec4::Zero();
  psi[2] = 1.0;
  CHECK(DensityMatrix::pure(psi).expectation(on_spin(Spin::proton, pauli_z())) == doctest::Approx(-1.0));
}

TEST_CASE("propagation preserves trace, hermiticity and positivity") {
  std::mt19937_64 rng(17);
  const SpinSystem sys;
  DensityMatrix rho = pseudo_pure_state(sys);
  for (int k = 0; k < 200; ++k) {
    rho = propagate(rho, random_hermitian(rng, 500.0), 1e-3);
  }
  const Mat4& m = rho.matrix();
  CHECK(std::abs(m.trace() - cplx(1.0)) < 1e-12);
  CHECK(max_abs(m - m.adjoint()) < 1e-12);
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  CHECK_THROWS_AS(propagate(rho, Mat4::Identity(), -1.0), std::invalid_argument);
}

TEST_CASE("propagate edge cases") {
  const SpinSystem sys;
  const DensityMatrix rho = thermal_state(sys);
  std::mt19937_64 rng(1);
  CHECK(max_abs(propagate(rho, random_hermitian(rng, 1.0), 0.0).matrix() - rho.matrix()) < 1e-15);
  // Diagonal H and diagonal rho commute.
  const DensityMatrix same = propagate(rho, internal_hamiltonian({3.977, 2.6752e8, 215, 40, -10, 1e-5}), 0.37);
  CHECK(max_abs(same.matrix() - rho.matrix()) < 1e-15);
}

TEST_CASE("ZZ evolution for a quarter period matches the exponential oracle") {
  SpinSystem sys;
  sys.epsilon = 1e-2;
  Vec4 psi;
  psi << 0.0, 0.0, 1.0, 0.0;  // |10>
  // Put the deviation on a superposition so ZZ leaves a visible phase.
  const Vec4 plus = (Vec4() << 0.0, 0.0, 1.0, 1.0).finished() / std::sqrt(2.0);
  for (const Vec4& dev : {psi, plus}) {
    const DensityMatrix rho = pseudo_pure_state(sys, dev);
    const Mat4 h = internal_hamiltonian(sys);
    const double t = 1.0 / (4.0 * sys.j_hz);
    const Mat4 u = expm_oracle(h, t);
    CHECK(max_abs(propagate(rho, h, t).matrix() - u * rho.matrix() * u.adjoint()) < 1e-14);
  }
}

TEST_CASE("internal hamiltonian") {
  SpinSystem sys;
  sys.offset_proton_hz = 100.0;
  sys.offset_carbon_hz = -30.0;
  const Mat4 h = internal_hamiltonian(sys);
  const double wh = 2 * std::numbers::pi * 100.0, wc = 2 * std::numbers::pi * -30.0;
  CHECK(h(0, 0).real() == doctest::Approx(-0.5 * wh - 0.5 * wc + std::numbers::pi * 215.0 / 2.0));
  CHECK(is_hermitian(h));
  SpinSystem zero;
  zero.j_hz = 0.0;
  CHECK(max_abs(internal_hamiltonian(zero)) == 0.0);
  SpinSystem coupled;
  const Mat4 hc = internal_hamiltonian(coupled);
  const double q = std::numbers::pi * 215.0 / 2.0;
  CHECK(hc(0, 0).real() == doctest::Approx(q));
  CHECK(hc(1, 1).real() == doctest::Approx(-q));
  CHECK(hc(2, 2).real() == doctest::Approx(-q));
  CHECK(hc(3, 3).real() == doctest::Approx(q));
  CHECK(std::abs(hc(0, 1)) == 0.0);
  SpinSystem bad;
  bad.j_hz = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = SpinSystem{};
  bad.epsilon = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("pseudo-pure state") {
  const SpinSystem sys;
  const double ep = sys.pseudo_pure_polarization();
  CHECK(ep == doctest::Approx(1e-5 * std::sqrt(3.0) / (4 * std::sqrt(2.0)) * (1 + 3.977)));
  const DensityMatrix pp = pseudo_pure_state(sys);
  CHECK(std::abs(pp.trace() - cplx(1.0)) < 1e-15);
  CHECK(pp.expectation(on_spin(Spin::proton, pauli_z())) == doctest::Approx(ep).epsilon(1e-12));
  CHECK(normalized_expectation(pp, zz(), sys) == doctest::Approx(1.0).epsilon(1e-9));

  // A unitary moves only the deviation.
  std::mt19937_64 rng(5);
  const Mat4 v = expm_oracle(random_hermitian(rng, 1.0), 1.0);
  Vec4 ground = Vec4::Zero();
  ground[0] = 1.0;
  const DensityMatrix moved = transform(pp, v);
  const DensityMatrix direct = pseudo_pure_state(sys, v * ground);
  CHECK(max_abs(moved.matrix() - direct.matrix()) < 1e-15);
}

TEST_CASE("thermal and equalized states") {
  const SpinSystem sys;
  const DensityMatrix th = thermal_state(sys);
  CHECK(th.expectation(on_spin(Spin::proton, pauli_z())) == doctest::Approx(4 * sys.epsilon * sys.gamma_ratio));
  CHECK(th.expectation(on_spin(Spin::carbon, pauli_z())) == doctest::Approx(4 * sys.epsilon));
  const DensityMatrix eq = equalized_state(sys);
  CHECK(eq.expectation(on_spin(Spin::proton, pauli_z())) ==
        doctest::Approx(eq.expectation(on_spin(Spin::carbon, pauli_z()))));
}

TEST_CASE("dephasing removes transverse coherence of one spin") {
  SpinSystem sys;
  sys.epsilon = 1e-2;
  const Vec4 psi = (Vec4() << 1.0, 1.0, 1.0, 1.0).finished() / 2.0;
  const DensityMatrix rho = pseudo_pure_state(sys, psi);
  const DensityMatrix d = dephase(rho, Spin::proton);
  CHECK(std::abs(d.expectation(on_spin(Spin::proton, pauli_x()))) < 1e-15);
  CHECK(d.expectation(on_spin(Spin::carbon, pauli_x())) ==
        doctest::Approx(rho.expectation(on_spin(Spin::carbon, pauli_x()))));
  CHECK(d.expectation(on_spin(Spin::proton, pauli_z())) ==
        doctest::Approx(rho.expectation(on_spin(Spin::proton, pauli_z()))));
}
