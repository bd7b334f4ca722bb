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

#include <stdexcept>
#include <string>
#include <vector>

#include "qlg/lattice.hpp"

namespace qlg::cli {

class TrajectoryFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Densities and occupations of a run, one frame per step (frame 0 is the
/// initial state).
struct TrajectoryTable {
  double dz = 1.0;
  Trajectory densities;
  std::vector<std::vector<OccupationPair>> occupations;

  std::size_t frames() const { return densities.size(); }
  std::size_t sites() const { return densities.empty() ? 0 : densities.front().size(); }
};

/// Builds a table whose occupations are the local equilibrium rho / 2.
TrajectoryTable equilibrium_table(const Trajectory& densities, double dz);

/// CSV with header step,site,z,rho,f1,f2 and 17 significant digits.
std::string format_trajectory_csv(const TrajectoryTable& table);
void write_trajectory_csv(const std::string& path, const TrajectoryTable& table);

/// Throws TrajectoryFormatError on a missing header, malformed numbers,
/// out-of-order rows or frames of unequal length.
TrajectoryTable parse_trajectory_csv(const std::string& text);
TrajectoryTable read_trajectory_csv(const std::string& path);

/// Formats a double with 17 significant digits.
std::string format_double(double v);

}  // namespace qlg::cli
