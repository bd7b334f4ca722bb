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

#include "qlg/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "qlg/reference.hpp"
#include "qlg/spin/pulse_sequence.hpp"

#ifndef QLG_VERSION
#define QLG_VERSION "0.0.0"
#endif

namespace qlg::cli {

namespace {

namespace fs = std::filesystem;

reference::ProfileSpec analytic_profile(const RunConfig& cfg) {
  const double dz = cfg.lattice.dz;
  switch (cfg.profile.kind) {
    case ProfileKind::gaussian:
      return reference::GaussianProfile{cfg.profile.center * dz, cfg.profile.sigma * dz, cfg.profile.mass};
    case ProfileKind::delta:
      return reference::GaussianProfile{static_cast<double>(cfg.profile.site) * dz, 0.0, cfg.profile.mass};
    case ProfileKind::uniform:
      return reference::UniformProfile{cfg.profile.level};
    case ProfileKind::file:
      break;
  }
  throw ConfigError("analytic solution needs a gaussian, delta or uniform profile");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

std::string resolve_output_dir(const std::string& flag, const RunConfig& cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return "qlg_output";
}

double frame_mass(const MassDensityField& rho) { return reference::total_mass(rho); }

}  // namespace

std::string version() { return QLG_VERSION; }

Trajectory reference_trajectory(Mode ref, const RunConfig& cfg, const MassDensityField& rho0) {
  Trajectory out{rho0};
  if (ref == Mode::oracle) {
    for (std::size_t t = 0; t < cfg.steps; ++t) out.push_back(reference::classical_average_step(out.back()));
    return out;
  }
  if (ref != Mode::analytic) throw ConfigError("reference must be oracle or analytic");
  const auto spec = analytic_profile(cfg);
  const auto params = reference::ContinuumParams::from_lattice(cfg.lattice);
  out.clear();
  for (std::size_t t = 0; t <= cfg.steps; ++t) {
    out.push_back(reference::continuum_solution(spec, static_cast<double>(t) * cfg.lattice.dt, params,
                                                cfg.lattice));
  }
  return out;
}

RunOutputs execute_run(const RunConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const MassDensityField rho0 = initial_density(cfg);

  RunOutputs outputs;
  outputs.trajectory.dz = cfg.lattice.dz;
  std::optional<spin::ExperimentResult> nmr;
  switch (cfg.mode) {
    case Mode::ideal: {
      std::optional<ShotNoise> noise;
      if (cfg.shots > 0) noise.emplace(cfg.shots, cfg.seed);
      auto r = run_detailed(rho0, cfg.steps, CollisionOperator::sqrt_swap(), cfg.lattice,
                            noise ? &*noise : nullptr);
      outputs.trajectory.densities = std::move(r.densities);
      outputs.trajectory.occupations = std::move(r.occupations);
      break;
    }
    case Mode::oracle:
    case Mode::analytic:
      outputs.trajectory = equilibrium_table(reference_trajectory(cfg.mode, cfg, rho0), cfg.lattice.dz);
      break;
    case Mode::nmr: {
      spin::ExperimentConfig e = cfg.nmr;
      e.lattice.n_slices = cfg.lattice.n_sites;
      e.initial_density = rho0;
      e.steps = cfg.steps;
      e.seed = cfg.seed;
      nmr = spin::simulate_experiment(e);
      outputs.trajectory.densities = nmr->densities;
      outputs.trajectory.occupations = nmr->occupations;
      const double nu = e.nutation_hz();
      const double table_nu = std::isfinite(nu) ? nu : spin::kIdealNutation;
      outputs.pulse_tables = "# collision\n" +
                             spin::compile_collision(e.system.j_hz, table_nu).to_table() +
                             "# swap\n" + spin::compile_swap(e.system.j_hz, table_nu).to_table();
      break;
    }
  }
  const Trajectory& traj = outputs.trajectory.densities;

  // References for the comparison table and the manifest.
  std::vector<std::pair<Mode, Trajectory>> refs;
  nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
  for (Mode m : cfg.compare) {
    if (m == Mode::analytic && cfg.profile.kind == ProfileKind::file) {
      skipped.push_back({{"reference", "analytic"}, {"reason", "no closed form for a file profile"}});
      continue;
    }
    refs.emplace_back(m, reference_trajectory(m, cfg, rho0));
  }
  Trajectory ideal_tier;
  if (nmr) ideal_tier = run(rho0, cfg.steps, CollisionOperator::sqrt_swap(), cfg.lattice);

  std::string table = "step,reference,rms,max_abs,mass_drift\n";
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  double cumulative = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    nlohmann::ordered_json rec{{"step", t}, {"mass", frame_mass(traj[t])}};
    nlohmann::ordered_json rms = nlohmann::ordered_json::object();
    for (const auto& [m, ref] : refs) {
      double max_abs = 0.0;
      for (std::size_t j = 0; j < traj[t].size(); ++j) {
        max_abs = std::max(max_abs, std::abs(traj[t][j] - ref[t][j]));
      }
      const double r = reference::rms_difference(traj[t], ref[t]);
      rms[mode_name(m)] = r;
      table += std::to_string(t) + "," + mode_name(m) + "," + format_double(r) + "," +
               format_double(max_abs) + "," + format_double(frame_mass(traj[t]) - frame_mass(ref[t])) +
               "\n";
    }
    rec["rms"] = rms;
    if (nmr) {
      const double dev = reference::rms_difference(traj[t], ideal_tier[t]);
      cumulative += dev;
      rec["rms_vs_ideal_tier"] = dev;
      rec["cumulative_error"] = cumulative;
      if (t > 0) {
        const auto& d = nmr->diagnostics[t - 1];
        rec["encoding_error"] = d.encoding_error;
        rec["out_of_range"] = d.out_of_range;
      }
    }
    steps.push_back(rec);
  }
  const auto stop = std::chrono::steady_clock::now();

  auto& m = outputs.manifest;
  m["version"] = version();
  m["mode"] = mode_name(cfg.mode);
  m["config"] = config_to_json(cfg);
  m["initial_mass"] = frame_mass(rho0);
  m["steps"] = steps;
  if (!skipped.empty()) m["references_skipped"] = skipped;
  if (nmr) {
    m["gate_fidelity"] = {{"collision", nmr->collision_fidelity}, {"swap", nmr->swap_fidelity}};
  }
  m["timing"] = {{"wall_seconds", std::chrono::duration<double>(stop - start).count()}};
  outputs.comparison_csv = table;
  return outputs;
}

std::vector<StepComparison> compare_trajectories(const TrajectoryTable& a, const TrajectoryTable& b) {
  if (a.frames() != b.frames() || a.sites() != b.sites()) {
    throw TrajectoryFormatError("shape mismatch: " + std::to_string(a.frames()) + "x" +
                                std::to_string(a.sites()) + " vs " + std::to_string(b.frames()) + "x" +
                                std::to_string(b.sites()));
  }
  std::vector<StepComparison> out;
  for (std::size_t t = 0; t < a.frames(); ++t) {
    StepComparison c;
    c.step = t;
    c.rms = reference::rms_difference(a.densities[t], b.densities[t]);
    for (std::size_t j = 0; j < a.sites(); ++j) {
      c.max_abs = std::max(c.max_abs, std::abs(a.densities[t][j] - b.densities[t][j]));
    }
    c.mass_drift = frame_mass(b.densities[t]) - frame_mass(a.densities[t]);
    out.push_back(c);
  }
  return out;
}

std::string plot_data(const TrajectoryTable& table) {
  if (table.frames() == 0 || table.sites() == 0) throw TrajectoryFormatError("empty trajectory");
  const auto& first = table.densities.front();
  const double peak = *std::max_element(first.begin(), first.end());
  if (!(peak > 0.0)) throw TrajectoryFormatError("initial frame has no positive peak to normalize by");
  std::string out = "step,site,z,rho_normalized\n";
  for (std::size_t t = 0; t < table.frames(); ++t) {
    for (std::size_t j = 0; j < table.sites(); ++j) {
      out += std::to_string(t) + "," + std::to_string(j) + "," +
             format_double(static_cast<double>(j) * table.dz) + "," +
             format_double(table.densities[t][j] / peak) + "\n";
    }
  }
  return out;
}

std::string plot_svg(const TrajectoryTable& table) {
  plot_data(table);  // same validation
  const auto& first = table.densities.front();
  const double peak = *std::max_element(first.begin(), first.end());
  const double w = 640.0;
  const double h = 400.0;
  const double pad = 40.0;
  const double xmax = static_cast<double>(std::max<std::size_t>(table.sites() - 1, 1));
  double ymax = 0.0;
  for (const auto& f : table.densities) ymax = std::max(ymax, *std::max_element(f.begin(), f.end()) / peak);
  ymax = std::max(ymax, 1.0);

  char buf[128];
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  svg += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf, "<polyline points=\"%g,%g %g,%g %g,%g\" fill=\"none\" stroke=\"black\"/>\n",
                pad, pad, pad, h - pad, w - pad, h - pad);
  svg += buf;
  for (std::size_t t = 0; t < table.frames(); ++t) {
    const double hue = 240.0 * static_cast<double>(t) / static_cast<double>(std::max<std::size_t>(table.frames() - 1, 1));
    std::snprintf(buf, sizeof buf, "<polyline fill=\"none\" stroke=\"hsl(%.0f,70%%,45%%)\" points=\"", hue);
    svg += buf;
    for (std::size_t j = 0; j < table.sites(); ++j) {
      const double x = pad + (w - 2 * pad) * static_cast<double>(j) / xmax;
      const double y = h - pad - (h - 2 * pad) * table.densities[t][j] / peak / ymax;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
      svg += buf;
    }
    svg += "\"><title>step " + std::to_string(t) + "</title></polyline>\n";
  }
  svg += "</svg>\n";
  return svg;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum lattice-gas diffusion runs and NMR-tier simulations", "qlg"};
  app.set_version_flag("--version", version());
  app.require_subcommand(1);

  std::string config_path;
  std::string mode_flag;
  std::string out_flag;
  auto* run_cmd = app.add_subcommand("run", "Run a configuration and write trajectory, manifest and comparison table");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--mode", mode_flag, "Override run.mode (ideal, nmr, oracle, analytic)");
  run_cmd->add_option("--out", out_flag, "Output directory (default: run.output_dir, $QLG_OUTPUT_DIR, qlg_output)");

  std::string traj_a;
  std::string traj_b;
  double tol = 1e-12;
  auto* cmp_cmd = app.add_subcommand("compare", "Per-step RMS, max-abs and mass drift between two trajectories");
  cmp_cmd->add_option("A", traj_a, "First trajectory CSV")->required();
  cmp_cmd->add_option("B", traj_b, "Second trajectory CSV")->required();
  cmp_cmd->add_option("--tol", tol, "Largest per-step RMS accepted")->check(CLI::NonNegativeNumber);

  std::string plot_in;
  std::string plot_out;
  std::string svg_out;
  auto* plot_cmd = app.add_subcommand("plotdata", "Normalized long-format plot data");
  plot_cmd->add_option("TRAJ", plot_in, "Trajectory CSV")->required();
  plot_cmd->add_option("--out", plot_out, "Output CSV")->required();
  plot_cmd->add_option("--svg", svg_out, "Also write an SVG chart");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version arrive here with exit code 0.
    return app.exit(e, out, err) == 0 ? exit_code::ok : exit_code::usage;
  }

  try {
    if (run_cmd->parsed()) {
      RunConfig cfg = load_config(config_path);
      if (!mode_flag.empty()) {
        cfg.mode = parse_mode(mode_flag);
        cfg.validate();
      }
      const RunOutputs r = execute_run(cfg);
      const fs::path dir = resolve_output_dir(out_flag, cfg);
      fs::create_directories(dir);
      write_trajectory_csv((dir / "trajectory.csv").string(), r.trajectory);
      write_text(dir / "manifest.json", r.manifest.dump(2) + "\n");
      write_text(dir / "comparison.csv", r.comparison_csv);
      if (!r.pulse_tables.empty()) write_text(dir / "pulses.tsv", r.pulse_tables);
      if (cfg.svg) write_text(dir / "trajectory.svg", plot_svg(r.trajectory));
      out << "wrote " << (dir / "trajectory.csv").string() << " (" << r.trajectory.frames()
          << " frames)\n";
      return exit_code::ok;
    }
    if (cmp_cmd->parsed()) {
      const auto a = read_trajectory_csv(traj_a);
      const auto b = read_trajectory_csv(traj_b);
      const auto rows = compare_trajectories(a, b);
      bool within = true;
      out << "step,rms,max_abs,mass_drift\n";
      for (const auto& c : rows) {
        out << c.step << "," << format_double(c.rms) << "," << format_double(c.max_abs) << ","
            << format_double(c.mass_drift) << "\n";
        within = within && c.rms <= tol;
      }
      if (!within) {
        err << "qlg: RMS difference exceeds tolerance " << format_double(tol) << "\n";
        return exit_code::tolerance;
      }
      return exit_code::ok;
    }
    if (plot_cmd->parsed()) {
      const auto t = read_trajectory_csv(plot_in);
      write_text(plot_out, plot_data(t));
      if (!svg_out.empty()) write_text(svg_out, plot_svg(t));
      out << "wrote " << plot_out << " (" << t.frames() << " series)\n";
      return exit_code::ok;
    }
  } catch (const ConfigError& e) {
    err << "qlg: config error: " << e.what() << "\n";
    return exit_code::validation;
  } catch (const TrajectoryFormatError& e) {
    err << "qlg: trajectory error: " << e.what() << "\n";
    return exit_code::validation;
  } catch (const std::exception& e) {
    err << "qlg: " << e.what() << "\n";
    return exit_code::validation;
  }
  return exit_code::usage;
}

}  // namespace qlg::cli
