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

#include "qlg/cli/trajectory_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qlg::cli {

namespace {

constexpr const char* kHeader = "step,site,z,rho,f1,f2";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

template <typename T>
T parse_field(const std::string& s, std::size_t line_no) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw TrajectoryFormatError("line " + std::to_string(line_no) + ": bad value '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TrajectoryTable equilibrium_table(const Trajectory& densities, double dz) {
  TrajectoryTable t;
  t.dz = dz;
  t.densities = densities;
  for (const auto& rho : densities) {
    std::vector<OccupationPair> pairs(rho.size());
    for (std::size_t j = 0; j < rho.size(); ++j) pairs[j] = {0.5 * rho[j], 0.5 * rho[j]};
    t.occupations.push_back(std::move(pairs));
  }
  return t;
}

std::string format_trajectory_csv(const TrajectoryTable& table) {
  std::string out = std::string(kHeader) + "\n";
  for (std::size_t t = 0; t < table.frames(); ++t) {
    const auto& rho = table.densities[t];
    for (std::size_t j = 0; j < rho.size(); ++j) {
      const OccupationPair p = t < table.occupations.size() ? table.occupations[t][j]
                                                            : OccupationPair{0.5 * rho[j], 0.5 * rho[j]};
      out += std::to_string(t) + "," + std::to_string(j) + "," +
             format_double(static_cast<double>(j) * table.dz) + "," + format_double(rho[j]) + "," +
             format_double(p.f1) + "," + format_double(p.f2) + "\n";
    }
  }
  return out;
}

void write_trajectory_csv(const std::string& path, const TrajectoryTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << format_trajectory_csv(table);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

TrajectoryTable parse_trajectory_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw TrajectoryFormatError("empty trajectory file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw TrajectoryFormatError("missing header '" + std::string(kHeader) + "'");

  TrajectoryTable table;
  std::size_t line_no = 1;
  bool dz_known = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != 6) {
      throw TrajectoryFormatError("line " + std::to_string(line_no) + ": expected 6 fields");
    }
    const auto step = parse_field<std::size_t>(f[0], line_no);
    const auto site = parse_field<std::size_t>(f[1], line_no);
    const auto z = parse_field<double>(f[2], line_no);
    const auto rho = parse_field<double>(f[3], line_no);
    const OccupationPair pair{parse_field<double>(f[4], line_no), parse_field<double>(f[5], line_no)};

    if (step == table.densities.size()) {
      if (site != 0) throw TrajectoryFormatError("line " + std::to_string(line_no) + ": frame must start at site 0");
      table.densities.emplace_back();
      table.occupations.emplace_back();
    } else if (step + 1 != table.densities.size()) {
      throw TrajectoryFormatError("line " + std::to_string(line_no) + ": steps out of order");
    }
    if (site != table.densities.back().size()) {
      throw TrajectoryFormatError("line " + std::to_string(line_no) + ": sites out of order");
    }
    if (site == 1 && !dz_known) {
      table.dz = z;
      dz_known = true;
    }
    table.densities.back().push_back(rho);
    table.occupations.back().push_back(pair);
  }
  if (table.densities.empty()) throw TrajectoryFormatError("trajectory has no rows");
  const std::size_t n = table.densities.front().size();
  for (std::size_t t = 0; t < table.densities.size(); ++t) {
    if (table.densities[t].size() != n) {
      throw TrajectoryFormatError("frame " + std::to_string(t) + " has " +
                                  std::to_string(table.densities[t].size()) + " sites, expected " +
                                  std::to_string(n));
    }
  }
  return table;
}

TrajectoryTable read_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TrajectoryFormatError("cannot read trajectory '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_trajectory_csv(buf.str());
}

}  // namespace qlg::cli
