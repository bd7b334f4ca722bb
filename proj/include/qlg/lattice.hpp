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
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace qlg {

using cplx = std::complex<double>;

/// Dimensionless mass density, one value per lattice site.
using MassDensityField = std::vector<double>;

/// Trajectory of mass density fields; element t is the field after t steps.
using Trajectory = std::vector<MassDensityField>;

/// Periodic one-dimensional lattice of two-qubit nodes.
struct LatticeConfig {
  std::size_t n_sites = 2;
  double dz = 1.0;
  double dt = 1.0;

  /// Throws std::invalid_argument unless n_sites >= 2, dz > 0, dt > 0.
  void validate() const;
  double length() const { return static_cast<double>(n_sites) * dz; }
};

/// Occupation probabilities of the upward- (f1) and downward-moving (f2)
/// particle at one site.
struct OccupationPair {
  double f1 = 0.0;
  double f2 = 0.0;

  double density() const { return f1 + f2; }
  bool valid() const { return f1 >= 0.0 && f1 <= 1.0 && f2 >= 0.0 && f2 <= 1.0; }
};

/// Two-qubit wavefunction of one node, amplitudes ordered
/// (|00>, |01>, |10>, |11>) with qubit 1 in the left slot.
class NodeState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws std::invalid_argument when the amplitudes are not normalized.
  explicit NodeState(const Eigen::Vector4cd& amplitudes);

  const Eigen::Vector4cd& amplitudes() const { return amplitudes_; }
  cplx operator[](std::size_t i) const { return amplitudes_[static_cast<Eigen::Index>(i)]; }

 private:
  Eigen::Vector4cd amplitudes_;
};

/// On-site 4x4 unitary collision.
class CollisionOperator {
 public:
  static constexpr double kUnitaryTolerance = 1e-12;

  /// Throws std::invalid_argument when `matrix` is not unitary.
  explicit CollisionOperator(const Eigen::Matrix4cd& matrix);

  /// The square root of SWAP; averages the two occupations on a node.
  static CollisionOperator sqrt_swap();

  const Eigen::Matrix4cd& matrix() const { return matrix_; }

 private:
  Eigen::Matrix4cd matrix_;
};

/// Exact SWAP in the (|00>, |01>, |10>, |11>) basis.
Eigen::Matrix4cd swap_matrix();

/// Finite-sample measurement noise: each occupation is replaced by the
/// fraction of excited outcomes in `shots` Bernoulli trials.
class ShotNoise {
 public:
  ShotNoise(std::uint64_t shots, std::uint64_t seed);

  double sample(double probability);
  std::uint64_t shots() const { return shots_; }

 private:
  std::uint64_t shots_;
  std::mt19937_64 rng_;
};

/// Local-equilibrium initialization f1 = f2 = rho / 2.
/// Throws std::invalid_argument if any rho lies outside [0, 2].
std::vector<OccupationPair> init_equilibrium(std::span<const double> rho);

NodeState encode_node(const OccupationPair& pair);
NodeState apply_collision(const NodeState& state, const CollisionOperator& c);

/// Exact expectation values of the two number operators.
OccupationPair measure_occupations(const NodeState& state);
OccupationPair measure_occupations(const NodeState& state, ShotNoise& noise);

/// f1 moves one site toward +z, f2 one site toward -z, periodic wraparound.
std::vector<OccupationPair> stream(std::span<const OccupationPair> pairs,
                                   const LatticeConfig& cfg);

/// One full update: encode, collide, measure at every site, then stream.
/// Sites are updated in parallel unless `noise` is given, in which case the
/// sites are sampled in index order so the draw sequence is reproducible.
std::vector<OccupationPair> step(std::span<const OccupationPair> pairs,
                                 const CollisionOperator& c,
                                 const LatticeConfig& cfg,
                                 ShotNoise* noise = nullptr);

MassDensityField densities(std::span<const OccupationPair> pairs);

struct RunResult {
  Trajectory densities;
  /// Occupations entering each step (and the final streamed occupations).
  std::vector<std::vector<OccupationPair>> occupations;
};

/// Runs `steps` updates from local equilibrium of `rho0`.
RunResult run_detailed(std::span<const double> rho0, std::size_t steps,
                       const CollisionOperator& c, const LatticeConfig& cfg,
                       ShotNoise* noise = nullptr);

Trajectory run(std::span<const double> rho0, std::size_t steps,
               const CollisionOperator& c, const LatticeConfig& cfg);

}  // namespace qlg
