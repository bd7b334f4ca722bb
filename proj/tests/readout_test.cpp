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
#include <vector>

#include "qlg/spin/readout.hpp"

using namespace qlg::spin;

namespace {

Vec4 basis(int k) {
  Vec4 v = Vec4::Zero();
  v[k] = 1.0;
  return v;
}

// Occupations of a pure two-qubit state, basis order |00>,|01>,|10>,|11>
// with the proton in the left slot.
qlg::OccupationPair pure_occupations(const Vec4& psi) {
  return {std::norm(psi[2]) + std::norm(psi[3]), std::norm(psi[1]) + std::norm(psi[3])};
}

Vec4 random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec4 v;
  for (int k = 0; k < 4; ++k) v[k] = cplx(g(rng), g(rng));
  return v.normalized();
}

}  // namespace

TEST_CASE("readout endpoints") {
  const SliceLattice lat;
  const SpinSystem sys;
  for (auto binning : {ReadoutBinning::direct, ReadoutBinning::spectral}) {
    ReadoutOptions opt;
    opt.binning = binning;
    const std::vector<DensityMatrix> up(lat.n_slices, pseudo_pure_state(sys, basis(3)));
    for (double f : read_proton(up, lat, sys, opt)) CHECK(f == doctest::Approx(1.0).epsilon(1e-9));
    const std::vector<DensityMatrix> down(lat.n_slices, pseudo_pure_state(sys, basis(0)));
    for (double f : read_proton(down, lat, sys, opt)) CHECK(std::abs(f) < 1e-9);
    const Vec4 half = (basis(0) + basis(2)) / std::sqrt(2.0);
    const std::vector<DensityMatrix> mid(lat.n_slices, pseudo_pure_state(sys, half));
    for (double f : read_proton(mid, lat, sys, opt)) CHECK(f == doctest::Approx(0.5).epsilon(1e-9));
  }
}

TEST_CASE("a single excited slice is resolved") {
  const SliceLattice lat;
  const SpinSystem sys;
  std::vector<DensityMatrix> states(lat.n_slices, pseudo_pure_state(sys, basis(0)));
  states[5] = pseudo_pure_state(sys, basis(2));
  const auto direct = read_proton(states, lat, sys, {ReadoutBinning::direct});
  const auto spectral = read_proton(states, lat, sys, {ReadoutBinning::spectral});
  for (std::size_t j = 0; j < lat.n_slices; ++j) {
    CHECK(direct[j] == doctest::Approx(j == 5 ? 1.0 : 0.0));
    CHECK(std::abs(spectral[j] - direct[j]) < 1e-3);
  }
}

TEST_CASE("gradient readout matches pure-state occupations") {
  const SliceLattice lat;
  const SpinSystem sys;
  std::mt19937_64 rng(7);
  std::vector<DensityMatrix> states;
  std::vector<qlg::OccupationPair> expected;
  for (std::size_t j = 0; j < lat.n_slices; ++j) {
    const Vec4 psi = random_state(rng);
    states.push_back(pseudo_pure_state(sys, psi));
    expected.push_back(pure_occupations(psi));
  }
  for (auto binning : {ReadoutBinning::direct, ReadoutBinning::spectral}) {
    for (double fraction : {1.0, 0.5}) {
      ReadoutOptions opt;
      opt.binning = binning;
      opt.band_fraction = fraction;
      const auto got = gradient_readout(states, lat, sys, opt);
      for (std::size_t j = 0; j < lat.n_slices; ++j) {
        CHECK(std::abs(got[j].f1 - expected[j].f1) < 1e-3);
        CHECK(std::abs(got[j].f2 - expected[j].f2) < 1e-3);
      }
    }
  }
  ReadoutOptions finite;
  finite.nutation_hz = 50.0 * sys.j_hz;
  const auto got = gradient_readout(states, lat, sys, finite);
  for (std::size_t j = 0; j < lat.n_slices; ++j) {
    CHECK(std::abs(got[j].f1 - expected[j].f1) < 0.02);
    CHECK(std::abs(got[j].f2 - expected[j].f2) < 0.02);
  }
}

TEST_CASE("per-voxel states are accepted") {
  SliceLattice lat;
  lat.n_slices = 4;
  lat.spins_per_slice = 2;
  const SpinSystem sys;
  std::vector<DensityMatrix> voxels(lat.voxel_count(), pseudo_pure_state(sys, basis(0)));
  voxels[2] = pseudo_pure_state(sys, basis(2));
  const auto f = read_proton(voxels, lat, sys, {ReadoutBinning::direct});
  CHECK(f[1] == doctest::Approx(0.5));
  CHECK(f[0] == doctest::Approx(0.0));
}

TEST_CASE("readout rejects bad input") {
  const SliceLattice lat;
  const SpinSystem sys;
  const std::vector<DensityMatrix> states(lat.n_slices, pseudo_pure_state(sys, basis(0)));
  ReadoutOptions opt;
  opt.band_fraction = 1.5;
  CHECK_THROWS_AS(read_proton(states, lat, sys, opt), std::invalid_argument);
  opt.band_fraction = 0.0;
  CHECK_THROWS_AS(read_proton(states, lat, sys, opt), std::invalid_argument);
  opt = ReadoutOptions{};
  opt.linewidth_hz = -1.0;
  CHECK_THROWS_AS(read_proton(states, lat, sys, opt), std::invalid_argument);
  const std::vector<DensityMatrix> wrong(3, pseudo_pure_state(sys, basis(0)));
  CHECK_THROWS_AS(read_proton(wrong, lat, sys), std::invalid_argument);
}

TEST_CASE("encode then readout is idempotent") {
  const SliceLattice lat;
  const SpinSystem sys;
  std::vector<qlg::OccupationPair> pairs(lat.n_slices);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    pairs[j] = {0.05 + 0.05 * static_cast<double>(j), 0.9 - 0.04 * static_cast<double>(j)};
  }
  auto encode = [&](const std::vector<qlg::OccupationPair>& p) {
    std::vector<DensityMatrix> s;
    for (const auto& x : p) s.push_back(pseudo_pure_state(sys, qlg::encode_node(x).amplitudes()));
    return s;
  };
  const auto once = gradient_readout(encode(pairs), lat, sys);
  const auto twice = gradient_readout(encode(once), lat, sys);
  for (std::size_t j = 0; j < pairs.size(); ++j) {
    CHECK(std::abs(once[j].f1 - pairs[j].f1) < 1e-3);
    CHECK(std::abs(once[j].f2 - pairs[j].f2) < 1e-3);
    CHECK(std::abs(twice[j].f1 - once[j].f1) < 1e-10);
    CHECK(std::abs(twice[j].f2 - once[j].f2) < 1e-10);
  }
}

TEST_CASE("linewidth leaks signal into neighbouring bands") {
  const SliceLattice lat;
  const SpinSystem sys;
  std::vector<DensityMatrix> states(lat.n_slices, pseudo_pure_state(sys, basis(0)));
  states[8] = pseudo_pure_state(sys, basis(2));
  ReadoutOptions opt;
  opt.linewidth_hz = 20.0;
  const auto f = read_proton(states, lat, sys, opt);
  CHECK(f[8] < 1.0 - 1e-3);
  CHECK(f[7] > 1e-3);
  CHECK(f[9] > 1e-3);
}
