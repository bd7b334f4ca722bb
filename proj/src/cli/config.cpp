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

#include "qlg/cli/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "qlg/reference.hpp"

namespace qlg::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Drops '#' comments and TOML-style quotes so the ini reader sees plain
// key=value pairs.
std::string normalize(const std::string& text) {
  std::istringstream in(text);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    bool quoted = false;
    std::string kept;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
        continue;
      }
      if (c == '#' && !quoted) break;
      kept.push_back(c);
    }
    out << trim(kept) << '\n';
  }
  return out.str();
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("'" + key + "' is not a number: '" + raw + "'");
  }
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw ConfigError("'" + key + "' is not a non-negative integer: '" + raw + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' is not a boolean: '" + raw + "'");
}

// Reads one section and remembers which keys were consumed.
class Section {
 public:
  Section(const pt::ptree* tree, std::string name) : tree_(tree), name_(std::move(name)) {}

  bool has(const std::string& key) {
    used_.insert(key);
    return tree_ != nullptr && tree_->get_child_optional(pt::ptree::path_type(key, '\0'));
  }
  std::string text(const std::string& key) {
    return tree_->get<std::string>(pt::ptree::path_type(key, '\0'));
  }
  void read(const std::string& key, double& out) {
    if (has(key)) out = to_double(qualified(key), text(key));
  }
  void read(const std::string& key, std::size_t& out) {
    if (has(key)) out = static_cast<std::size_t>(to_count(qualified(key), text(key)));
  }
  void read_u64(const std::string& key, std::uint64_t& out) {
    if (has(key)) out = to_count(qualified(key), text(key));
  }
  void read(const std::string& key, bool& out) {
    if (has(key)) out = to_bool(qualified(key), text(key));
  }
  void read(const std::string& key, std::string& out) {
    if (has(key)) out = trim(text(key));
  }
  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void reject_unknown() const {
    if (tree_ == nullptr) return;
    for (const auto& [key, _] : *tree_) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + qualified(key) + "'");
    }
  }

 private:
  const pt::ptree* tree_;
  std::string name_;
  std::set<std::string> used_;
};

template <typename E>
E pick(const std::string& key, const std::string& value,
       std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? name : std::string(", ") + name;
  }
  throw ConfigError("'" + key + "' must be one of " + names + ", got '" + value + "'");
}

const char* kind_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::gaussian: return "gaussian";
    case ProfileKind::delta: return "delta";
    case ProfileKind::uniform: return "uniform";
    case ProfileKind::file: return "file";
  }
  return "";
}

std::vector<Mode> parse_mode_list(const std::string& key, const std::string& raw) {
  std::vector<Mode> out;
  std::istringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const Mode m = pick<Mode>(key, item, {{"oracle", Mode::oracle}, {"analytic", Mode::analytic}});
    out.push_back(m);
  }
  return out;
}

}  // namespace

Mode parse_mode(const std::string& name) {
  return pick<Mode>("mode", trim(name),
                    {{"ideal", Mode::ideal}, {"nmr", Mode::nmr}, {"oracle", Mode::oracle},
                     {"analytic", Mode::analytic}});
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::ideal: return "ideal";
    case Mode::nmr: return "nmr";
    case Mode::oracle: return "oracle";
    case Mode::analytic: return "analytic";
  }
  return "";
}

void RunConfig::validate() const {
  try {
    lattice.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (profile.kind == ProfileKind::gaussian && !(profile.sigma >= 0.0)) {
    throw ConfigError("profile.sigma must be non-negative");
  }
  if (profile.kind == ProfileKind::delta && profile.site >= lattice.n_sites) {
    throw ConfigError("profile.site lies outside the lattice");
  }
  if (profile.kind == ProfileKind::file && profile.path.empty()) {
    throw ConfigError("profile.path is required for a file profile");
  }
  if (mode == Mode::nmr) {
    if (shots != 0) throw ConfigError("run.shots applies to ideal mode only; use nmr.readout_noise");
    try {
      spin::ExperimentConfig probe = nmr;
      probe.lattice.n_slices = lattice.n_sites;
      probe.initial_density.assign(lattice.n_sites, 0.0);
      probe.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("nmr: ") + e.what());
    }
  }
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  try {
    std::istringstream in(normalize(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  static const std::set<std::string> kSections{"run", "profile", "spin", "slices", "nmr"};
  for (const auto& [name, child] : tree) {
    if (!kSections.count(name)) throw ConfigError("unknown section [" + name + "]");
    if (child.empty() && !child.data().empty()) {
      throw ConfigError("key '" + name + "' must appear inside a section");
    }
  }
  const auto section = [&](const char* name) {
    const auto child = tree.get_child_optional(name);
    return Section(child ? &*child : nullptr, name);
  };

  RunConfig cfg;
  Section run = section("run");
  if (run.has("mode")) cfg.mode = parse_mode(run.text("mode"));
  run.read("n_sites", cfg.lattice.n_sites);
  run.read("dz", cfg.lattice.dz);
  run.read("dt", cfg.lattice.dt);
  run.read("steps", cfg.steps);
  run.read_u64("seed", cfg.seed);
  run.read_u64("shots", cfg.shots);
  if (run.has("compare")) cfg.compare = parse_mode_list(run.qualified("compare"), run.text("compare"));
  run.read("output_dir", cfg.output_dir);
  run.read("svg", cfg.svg);
  run.reject_unknown();

  Section prof = section("profile");
  if (prof.has("kind")) {
    cfg.profile.kind = pick<ProfileKind>("profile.kind", trim(prof.text("kind")),
                                         {{"gaussian", ProfileKind::gaussian},
                                          {"delta", ProfileKind::delta},
                                          {"uniform", ProfileKind::uniform},
                                          {"file", ProfileKind::file}});
  }
  prof.read("center", cfg.profile.center);
  prof.read("sigma", cfg.profile.sigma);
  prof.read("mass", cfg.profile.mass);
  prof.read("site", cfg.profile.site);
  prof.read("level", cfg.profile.level);
  prof.read("path", cfg.profile.path);
  prof.reject_unknown();
  if (!cfg.profile.path.empty() && std::filesystem::path(cfg.profile.path).is_relative()) {
    cfg.profile.path = (std::filesystem::path(base_dir) / cfg.profile.path).lexically_normal().string();
  }

  Section spin_sec = section("spin");
  auto& sys = cfg.nmr.system;
  spin_sec.read("j_hz", sys.j_hz);
  spin_sec.read("gamma_ratio", sys.gamma_ratio);
  spin_sec.read("gamma_proton", sys.gamma_proton);
  spin_sec.read("epsilon", sys.epsilon);
  spin_sec.read("offset_proton_hz", sys.offset_proton_hz);
  spin_sec.read("offset_carbon_hz", sys.offset_carbon_hz);
  spin_sec.reject_unknown();

  Section slices = section("slices");
  slices.read("slice_width", cfg.nmr.lattice.slice_width);
  slices.read("gradient", cfg.nmr.lattice.gradient);
  slices.read("spins_per_slice", cfg.nmr.lattice.spins_per_slice);
  slices.reject_unknown();

  Section nmr = section("nmr");
  auto& e = cfg.nmr;
  if (nmr.has("rotations")) {
    e.rotations = pick<spin::RotationMode>(
        "nmr.rotations", trim(nmr.text("rotations")),
        {{"ideal", spin::RotationMode::ideal}, {"finite_power", spin::RotationMode::finite_power}});
  }
  nmr.read("nutation_ratio", e.nutation_ratio);
  if (nmr.has("encoding")) {
    e.encoding = pick<spin::EncodingMode>(
        "nmr.encoding", trim(nmr.text("encoding")),
        {{"exact", spin::EncodingMode::exact}, {"shaped", spin::EncodingMode::shaped}});
  }
  nmr.read("flip_angle", e.flip_angle);
  if (nmr.has("decoupling")) {
    e.decoupling.mode = pick<spin::DecouplingMode>(
        "nmr.decoupling", trim(nmr.text("decoupling")),
        {{"off", spin::DecouplingMode::off},
         {"ideal", spin::DecouplingMode::ideal},
         {"pulsed", spin::DecouplingMode::pulsed}});
  }
  nmr.read("decoupling_spacing", e.decoupling.spacing);
  if (nmr.has("readout")) {
    e.readout.binning = pick<spin::ReadoutBinning>(
        "nmr.readout", trim(nmr.text("readout")),
        {{"direct", spin::ReadoutBinning::direct}, {"spectral", spin::ReadoutBinning::spectral}});
  }
  nmr.read("band_fraction", e.readout.band_fraction);
  nmr.read("linewidth_hz", e.readout.linewidth_hz);
  nmr.read("readout_noise", e.readout_noise);
  nmr.reject_unknown();

  cfg.nmr.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const auto base = std::filesystem::path(path).parent_path();
  return parse_config(buf.str(), base.empty() ? "." : base.string());
}

nlohmann::ordered_json config_to_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["run"] = {{"mode", mode_name(cfg.mode)},
              {"n_sites", cfg.lattice.n_sites},
              {"dz", cfg.lattice.dz},
              {"dt", cfg.lattice.dt},
              {"steps", cfg.steps},
              {"seed", cfg.seed},
              {"shots", cfg.shots}};
  auto compare = nlohmann::ordered_json::array();
  for (Mode m : cfg.compare) compare.push_back(mode_name(m));
  j["run"]["compare"] = compare;

  nlohmann::ordered_json prof{{"kind", kind_name(cfg.profile.kind)}};
  switch (cfg.profile.kind) {
    case ProfileKind::gaussian:
      prof["center"] = cfg.profile.center;
      prof["sigma"] = cfg.profile.sigma;
      prof["mass"] = cfg.profile.mass;
      break;
    case ProfileKind::delta:
      prof["site"] = cfg.profile.site;
      prof["mass"] = cfg.profile.mass;
      break;
    case ProfileKind::uniform:
      prof["level"] = cfg.profile.level;
      break;
    case ProfileKind::file:
      prof["path"] = cfg.profile.path;
      break;
  }
  j["profile"] = prof;

  if (cfg.mode == Mode::nmr) {
    const auto& s = cfg.nmr.system;
    j["spin"] = {{"j_hz", s.j_hz},
                 {"gamma_ratio", s.gamma_ratio},
                 {"gamma_proton", s.gamma_proton},
                 {"epsilon", s.epsilon},
                 {"offset_proton_hz", s.offset_proton_hz},
                 {"offset_carbon_hz", s.offset_carbon_hz}};
    j["slices"] = {{"slice_width", cfg.nmr.lattice.slice_width},
                   {"gradient", cfg.nmr.lattice.gradient},
                   {"spins_per_slice", cfg.nmr.lattice.spins_per_slice}};
    const auto& e = cfg.nmr;
    const char* decoupling = e.decoupling.mode == spin::DecouplingMode::off     ? "off"
                             : e.decoupling.mode == spin::DecouplingMode::ideal ? "ideal"
                                                                                : "pulsed";
    j["nmr"] = {
        {"rotations", e.rotations == spin::RotationMode::ideal ? "ideal" : "finite_power"},
        {"nutation_ratio", e.nutation_ratio},
        {"encoding", e.encoding == spin::EncodingMode::exact ? "exact" : "shaped"},
        {"flip_angle", e.flip_angle},
        {"decoupling", decoupling},
        {"decoupling_spacing", e.decoupling_spacing()},
        {"readout", e.readout.binning == spin::ReadoutBinning::direct ? "direct" : "spectral"},
        {"band_fraction", e.readout.band_fraction},
        {"linewidth_hz", e.readout.linewidth_hz},
        {"readout_noise", e.readout_noise}};
  }
  return j;
}

MassDensityField initial_density(const RunConfig& cfg) {
  const std::size_t n = cfg.lattice.n_sites;
  MassDensityField rho(n, 0.0);
  switch (cfg.profile.kind) {
    case ProfileKind::gaussian: {
      const reference::GaussianProfile g{cfg.profile.center * cfg.lattice.dz,
                                         cfg.profile.sigma * cfg.lattice.dz, cfg.profile.mass};
      rho = reference::continuum_solution(g, 0.0, reference::ContinuumParams::from_lattice(cfg.lattice),
                                          cfg.lattice);
      break;
    }
    case ProfileKind::delta:
      rho[cfg.profile.site] = cfg.profile.mass;
      break;
    case ProfileKind::uniform:
      std::fill(rho.begin(), rho.end(), cfg.profile.level);
      break;
    case ProfileKind::file: {
      std::ifstream in(cfg.profile.path);
      if (!in) throw ConfigError("cannot read profile file '" + cfg.profile.path + "'");
      rho.clear();
      std::string line;
      while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        rho.push_back(to_double("profile file value", line));
      }
      if (rho.size() != n) {
        throw ConfigError("profile file has " + std::to_string(rho.size()) + " values, lattice has " +
                          std::to_string(n) + " sites");
      }
      break;
    }
  }
  double mass = 0.0;
  for (double r : rho) {
    if (!(r >= 0.0 && r <= 2.0)) {
      throw ConfigError("initial density must lie in [0, 2] at every site to be encodable");
    }
    mass += r;
  }
  if (mass > 2.0 * static_cast<double>(n)) throw ConfigError("profile mass exceeds 2 * n_sites");
  return rho;
}

}  // namespace qlg::cli
