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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "qlg/spin/pulse_sequence.hpp"

using namespace qlg::spin;

namespace {

const cplx kI(0.0, 1.0);
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double max_abs(const Mat4& m) { return m.cwiseAbs().maxCoeff(); }

// Refined-step oracle: every piecewise-constant interval is split into
// `refine` sub-steps whose Hamiltonian is rebuilt from the event list at the
// sub-step midpoint and exponentiated with Eigen's matrix exponential.
Mat4 stepped_unitary(const PulseSequence& seq, const SpinSystem& sys, double z, int refine) {
  std::set<double> cuts{0.0, seq.duration()};
  for (const auto& e : seq.events()) {
    cuts.insert(e.start);
    if (const auto* p = std::get_if<RfPulse>(&e.event)) cuts.insert(e.start + p->duration());
    if (const auto* d = std::get_if<Delay>(&e.event)) cuts.insert(e.start + d->duration);
  }
  const std::vector<double> t(cuts.begin(), cuts.end());
  Mat4 u = Mat4::Identity();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double h_step = (t[k + 1] - t[k]) / refine;
    for (int s = 0; s < refine; ++s) {
      const double mid = t[k] + (s + 0.5) * h_step;
      double gradient = 0.0;
      double last_toggle = -1.0;
      Mat4 h = Mat4::Zero();
      for (const auto& e : seq.events()) {
        if (const auto* g = std::get_if<GradientToggle>(&e.event)) {
          if (e.start <= mid && e.start >= last_toggle) {
            gradient = g->on ? g->strength : 0.0;
            last_toggle = e.start;
          }
        }
        if (const auto* p = std::get_if<RfPulse>(&e.event)) {
          if (mid > e.start && mid < e.start + p->duration()) {
            const double w = kTwoPi * p->nutation_hz * (p->angle < 0 ? -1.0 : 1.0);
            h += on_spin(p->spin, -0.5 * w * (std::cos(p->phase) * pauli_x() + std::sin(p->phase) * pauli_y()));
          }
        }
      }
      const double nu_h = sys.gamma_proton * gradient * z / kTwoPi;
      h += internal_hamiltonian(sys, nu_h, nu_h / sys.gamma_ratio);
      u = Mat4((-kI * h_step * h).exp()) * u;
    }
  }
  return u;
}

}  // namespace

TEST_CASE("rf pulse durations") {
  CHECK(RfPulse{Spin::proton, 0.0, std::numbers::pi / 2, kIdealNutation}.duration() == 0.0);
  CHECK(RfPulse{Spin::proton, 0.0, std::numbers::pi / 2, 1000.0}.duration() == doctest::Approx(2.5e-4));
  CHECK_THROWS_AS((RfPulse{Spin::proton, 0.0, 1.0, -5.0}.duration()), std::invalid_argument);
  CHECK_THROWS_AS(PulseSequence().then(Delay{-1.0}), std::invalid_argument);
}

TEST_CASE("sequence bookkeeping and table export") {
  PulseSequence seq;
  seq.then(RfPulse{Spin::proton, phase::y, std::numbers::pi / 2, 1000.0});
  seq.with(RfPulse{Spin::carbon, phase::y, std::numbers::pi / 2, 500.0});
  seq.then(Delay{1e-3});
  seq.then(GradientToggle{true, 0.01});
  CHECK(seq.duration() == doctest::Approx(5e-4 + 1e-3));
  CHECK(seq.events()[1].start == 0.0);
  const std::string table = seq.to_table();
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  CHECK(line == "kind\tspin\tphase_deg\tamplitude\tduration_s\tstart_s");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), '\t') == 5);
  }
  CHECK(rows == 4);
  CHECK(table.find("rf_pulse\tC\t90\t500\t") != std::string::npos);
  CHECK(table.find("gradient_on") != std::string::npos);
}

TEST_CASE("empty sequence and single pulses") {
  const SpinSystem sys;
  CHECK(max_abs(sequence_unitary(PulseSequence{}, sys) - Mat4::Identity()) < 1e-15);
  PulseSequence pi;
  pi.then(RfPulse{Spin::proton, phase::x, std::numbers::pi, kIdealNutation});
  CHECK(gate_fidelity(sequence_unitary(pi, sys), on_spin(Spin::proton, pauli_x())) > 1 - 1e-14);
  // Strong but finite pulse approaches the same gate.
  PulseSequence strong;
  strong.then(RfPulse{Spin::proton, phase::x, std::numbers::pi, 1e7});
  CHECK(gate_fidelity(sequence_unitary(strong, sys), on_spin(Spin::proton, pauli_x())) > 1 - 1e-8);
}

TEST_CASE("overlapping pulses on one spin are rejected") {
  PulseSequence seq;
  seq.then(RfPulse{Spin::proton, 0.0, 1.0, 100.0});
  seq.with(RfPulse{Spin::proton, phase::y, 1.0, 100.0});
  CHECK_THROWS_AS(sequence_unitary(seq, SpinSystem{}), std::invalid_argument);
}

TEST_CASE("ideal compiled gates") {
  const SpinSystem sys;
  const Mat4 c = sequence_unitary(compile_collision(sys.j_hz, kIdealNutation), sys);
  CHECK(gate_fidelity(c, sqrt_swap_gate()) >= 1 - 1e-10);
  const Mat4 s = sequence_unitary(compile_swap(sys.j_hz, kIdealNutation), sys);
  CHECK(gate_fidelity(s, swap_gate()) >= 1 - 1e-10);
  CHECK(gate_fidelity(c * c, s) >= 1 - 1e-10);
  // |01> -> |10>
  const Vec4 out = s * (Vec4() << 0.0, 1.0, 0.0, 0.0).finished();
  CHECK(std::abs(std::abs(out[2]) - 1.0) < 1e-12);
  CHECK(compile_collision(215.0, 1e4).events().size() == 11);
  CHECK_THROWS_AS(compile_collision(0.0, 1e4), std::invalid_argument);
  CHECK_THROWS_AS(compile_swap(215.0, 0.0), std::invalid_argument);
}

TEST_CASE("compiled gates do not depend on J") {
  for (double j : {50.0, 215.0, 700.0}) {
    SpinSystem sys;
    sys.j_hz = j;
    const double f = gate_fidelity(sequence_unitary(compile_collision(j, 50.0 * j), sys), sqrt_swap_gate());
    CHECK(f == doctest::Approx(0.99977).epsilon(1e-5));
  }
}

TEST_CASE("finite power matches the refined-step oracle") {
  SpinSystem sys;
  sys.offset_proton_hz = 12.0;
  sys.offset_carbon_hz = -7.0;
  for (double ratio : {10.0, 50.0}) {
    const auto seq = compile_collision(sys.j_hz, ratio * sys.j_hz);
    CHECK(max_abs(sequence_unitary(seq, sys) - stepped_unitary(seq, sys, 0.0, 10)) < 1e-8);
  }
  PulseSequence grad;
  grad.then(GradientToggle{true, 2e-3});
  grad.then(compile_swap(sys.j_hz, 40.0 * sys.j_hz));
  grad.then(GradientToggle{false, 0.0});
  grad.then(Delay{1e-3});
  CHECK(max_abs(sequence_unitary(grad, sys, 1e-3) - stepped_unitary(grad, sys, 1e-3, 10)) < 1e-8);
}

TEST_CASE("fidelity grows with nutation rate") {
  const SpinSystem sys;
  double prev = 0.0;
  for (double ratio : {10.0, 20.0, 50.0, 100.0, 500.0}) {
    const double f = gate_fidelity(sequence_unitary(compile_collision(sys.j_hz, ratio * sys.j_hz), sys), sqrt_swap_gate());
    CHECK(f >= prev);
    prev = f;
    if (ratio == 50.0) {
      CHECK(f >= 0.99);
      CHECK(f <= 0.9999);
    }
  }
}

TEST_CASE("gate fidelity") {
  const Mat4 u = sqrt_swap_gate();
  CHECK(gate_fidelity(u, u) == doctest::Approx(1.0));
  CHECK(gate_fidelity(u, std::polar(1.0, 0.7) * u) == doctest::Approx(1.0));
  CHECK(gate_fidelity(Mat4::Identity(), swap_gate()) == doctest::Approx(0.5));
  CHECK_THROWS_AS(gate_fidelity(2.0 * u, u), std::invalid_argument);
}
