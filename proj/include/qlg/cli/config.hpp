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

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlg/lattice.hpp"
#include "qlg/spin/experiment.hpp"

namespace qlg::cli {

/// Malformed or inconsistent run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { ideal, nmr, oracle, analytic };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

enum class ProfileKind { gaussian, delta, uniform, file };

struct ProfileConfig {
  ProfileKind kind = ProfileKind::gaussian;
  double center = 7.5;  ///< site units
  double sigma = 2.0;   ///< site units
  double mass = 5.0;
  std::size_t site = 0;
  double level = 1.0;
  std::string path;  ///< one density per line, resolved against the config file
};

struct RunConfig {
  Mode mode = Mode::ideal;
  LatticeConfig lattice{16, 1.0, 1.0};
  std::size_t steps = 7;
  ProfileConfig profile;
  std::uint64_t seed = 0;
  /// Bernoulli shots per measured occupation in ideal mode; 0 is exact.
  std::uint64_t shots = 0;
  /// References the comparison table is computed against.
  std::vector<Mode> compare{Mode::oracle, Mode::analytic};
  std::string output_dir;
  bool svg = false;
  /// NMR switches and physics; initial_density and steps are filled in at
  /// run time.
  spin::ExperimentConfig nmr;

  /// Throws ConfigError.
  void validate() const;
};

/// Parses the sectioned key = value text format ([run], [profile], [spin],
/// [slices], [nmr]). Unknown sections or keys are rejected. `base_dir`
/// resolves relative profile paths.
RunConfig parse_config(const std::string& text, const std::string& base_dir = ".");

/// Reads and parses a config file. Throws ConfigError when unreadable.
RunConfig load_config(const std::string& path);

/// Every setting, for the manifest.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

/// Initial density on the lattice sites. Throws ConfigError for a profile
/// that cannot be encoded (values outside [0, 2]) or a bad profile file.
MassDensityField initial_density(const RunConfig& cfg);

}  // namespace qlg::cli
