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

#include "qlg/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qlg {

void LatticeConfig::validate() const {
  if (n_sites < 2) throw std::invalid_argument("lattice needs at least 2 sites");
  if (!(dz > 0.0)) throw std::invalid_argument("lattice spacing must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
}

NodeState::NodeState(const Eigen::Vector4cd& amplitudes) : amplitudes_(amplitudes) {
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kNormTolerance) {
    throw std::invalid_argument("node state is not normalized");
  }
}

CollisionOperator::CollisionOperator(const Eigen::Matrix4cd& matrix) : matrix_(matrix) {
  const Eigen::Matrix4cd defect = matrix_.adjoint() * matrix_ - Eigen::Matrix4cd::Identity();
  if (defect.cwiseAbs().maxCoeff() > kUnitaryTolerance) {
    throw std::invalid_argument("collision operator is not unitary");
  }
}

CollisionOperator CollisionOperator::sqrt_swap() {
  const cplx a(0.5, 0.5);
  const cplx b(0.5, -0.5);
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = a;
  m(1, 2) = b;
  m(2, 1) = b;
  m(2, 2) = a;
  m(3, 3) = 1.0;
  return CollisionOperator(m);
}

Eigen::Matrix4cd swap_matrix() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 0) = 1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  m(3, 3) = 1.0;
  return m;
}

ShotNoise::ShotNoise(std::uint64_t shots, std::uint64_t seed) : shots_(shots), rng_(seed) {
  if (shots_ == 0) throw std::invalid_argument("shot noise needs at least one shot");
}

double ShotNoise::sample(double probability) {
  std::binomial_distribution<std::uint64_t> dist(shots_, std::clamp(probability, 0.0, 1.0));
  return static_cast<double>(dist(rng_)) / static_cast<double>(shots_);
}

std::vector<OccupationPair> init_equilibrium(std::span<const double> rho) {
  std::vector<OccupationPair> pairs;
  pairs.reserve(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.0 && rho[i] <= 2.0)) {
      throw std::invalid_argument("density " + std::to_string(rho[i]) + " at site " +
                                  std::to_string(i) + " is outside [0, 2]");
    }
    pairs.push_back({0.5 * rho[i], 0.5 * rho[i]});
  }
  return pairs;
}

NodeState encode_node(const OccupationPair& pair) {
  if (!pair.valid()) throw std::invalid_argument("occupation outside [0, 1]");
  const double f1 = pair.f1;
  const double f2 = pair.f2;
  Eigen::Vector4cd amp;
  amp << std::sqrt((1.0 - f1) * (1.0 - f2)), std::sqrt((1.0 - f1) * f2),
      std::sqrt(f1 * (1.0 - f2)), std::sqrt(f1 * f2);
  // The four products sum to one analytically; rounding can leave ~1 ulp.
  amp /= amp.norm();
  return NodeState(amp);
}

NodeState apply_collision(const NodeState& state, const CollisionOperator& c) {
  return NodeState(c.matrix() * state.amplitudes());
}

OccupationPair measure_occupations(const NodeState& state) {
  const auto& a = state.amplitudes();
  const double p01 = std::norm(a[1]);
  const double p10 = std::norm(a[2]);
  const double p11 = std::norm(a[3]);
  return {p10 + p11, p01 + p11};
}

OccupationPair measure_occupations(const NodeState& state, ShotNoise& noise) {
  const OccupationPair exact = measure_occupations(state);
  const double f1 = noise.sample(exact.f1);
  const double f2 = noise.sample(exact.f2);
  return {f1, f2};
}

std::vector<OccupationPair> stream(std::span<const OccupationPair> pairs,
                                   const LatticeConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.n_sites;
  if (pairs.size() != n) {
    throw std::invalid_argument("stream: " + std::to_string(pairs.size()) +
                                " occupation pairs for a lattice of " + std::to_string(n));
  }
  std::vector<OccupationPair> out(n);
  for (std::size_t z = 0; z < n; ++z) {
    out[(z + 1) % n].f1 = pairs[z].f1;
    out[(z + n - 1) % n].f2 = pairs[z].f2;
  }
  return out;
}

std::vector<OccupationPair> step(std::span<const OccupationPair> pairs,
                                 const CollisionOperator& c, const LatticeConfig& cfg,
                                 ShotNoise* noise) {
  cfg.validate();
  if (pairs.size() != cfg.n_sites) {
    throw std::invalid_argument("step: occupation count does not match lattice size");
  }
  const auto n = static_cast<std::ptrdiff_t>(pairs.size());
  std::vector<OccupationPair> collided(pairs.size());
  if (noise != nullptr) {
    for (std::ptrdiff_t z = 0; z < n; ++z) {
      collided[z] = measure_occupations(apply_collision(encode_node(pairs[z]), c), *noise);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t z = 0; z < n; ++z) {
      collided[z] = measure_occupations(apply_collision(encode_node(pairs[z]), c));
    }
  }
  return stream(collided, cfg);
}

MassDensityField densities(std::span<const OccupationPair> pairs) {
  MassDensityField rho(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) rho[i] = pairs[i].density();
  return rho;
}

RunResult run_detailed(std::span<const double> rho0, std::size_t steps,
                       const CollisionOperator& c, const LatticeConfig& cfg,
                       ShotNoise* noise) {
  cfg.validate();
  if (rho0.size() != cfg.n_sites) {
    throw std::invalid_argument("initial density length does not match lattice size");
  }
  RunResult result;
  result.densities.reserve(steps + 1);
  result.occupations.reserve(steps + 1);
  result.densities.emplace_back(rho0.begin(), rho0.end());
  result.occupations.push_back(init_equilibrium(rho0));
  for (std::size_t t = 0; t < steps; ++t) {
    auto next = step(result.occupations.back(), c, cfg, noise);
    result.densities.push_back(densities(next));
    result.occupations.push_back(std::move(next));
  }
  return result;
}

Trajectory run(std::span<const double> rho0, std::size_t steps, const CollisionOperator& c,
               const LatticeConfig& cfg) {
  return run_detailed(rho0, steps, c, cfg).densities;
}

}  // namespace qlg
