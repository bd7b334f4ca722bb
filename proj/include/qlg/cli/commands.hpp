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

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlg/cli/config.hpp"
#include "qlg/cli/trajectory_io.hpp"

namespace qlg::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 1;
inline constexpr int validation = 2;
inline constexpr int tolerance = 3;
}  // namespace exit_code

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "QLG_OUTPUT_DIR";

std::string version();

/// Trajectory of the oracle (repeated two-neighbour average) or the analytic
/// continuum solution for the configured profile. Throws ConfigError when
/// the analytic solution is requested for a file profile.
Trajectory reference_trajectory(Mode reference, const RunConfig& cfg,
                                const MassDensityField& rho0);

struct RunOutputs {
  TrajectoryTable trajectory;
  nlohmann::ordered_json manifest;
  std::string comparison_csv;
  /// Tab-separated pulse tables of the compiled gates (nmr mode only).
  std::string pulse_tables;
};

/// Runs the configured mode without touching the filesystem.
RunOutputs execute_run(const RunConfig& cfg);

struct StepComparison {
  std::size_t step = 0;
  double rms = 0.0;
  double max_abs = 0.0;
  double mass_drift = 0.0;  ///< mass(b) - mass(a)
};

/// Per-step differences. Throws TrajectoryFormatError on a shape mismatch.
std::vector<StepComparison> compare_trajectories(const TrajectoryTable& a, const TrajectoryTable& b);

/// Long-format plot data, step,site,z,rho_normalized, normalized by the
/// peak of frame 0. Throws TrajectoryFormatError for an empty trajectory or
/// a zero initial peak.
std::string plot_data(const TrajectoryTable& table);

/// Static SVG line chart with one series per frame.
std::string plot_svg(const TrajectoryTable& table);

/// Entry point for the `qlg` executable.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace qlg::cli
