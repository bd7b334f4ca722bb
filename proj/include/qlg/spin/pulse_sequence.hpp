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

#include <limits>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "qlg/spin/operators.hpp"
#include "qlg/spin/spin_system.hpp"

namespace qlg::spin {

namespace phase {
inline constexpr double x = 0.0;
inline constexpr double y = 0.5 * std::numbers::pi;
inline constexpr double minus_x = std::numbers::pi;
inline constexpr double minus_y = 1.5 * std::numbers::pi;
}  // namespace phase

inline constexpr double kIdealNutation = std::numeric_limits<double>::infinity();

/// Resonant RF pulse on one spin. The RF Hamiltonian is
/// -1/2 [w_x sigma_x + w_y sigma_y] with (w_x, w_y) = 2 pi nu (cos phase,
/// sin phase), so the pulse applies exp(+i angle/2 (cos phase sigma_x +
/// sin phase sigma_y)). An infinite nutation rate is the instantaneous limit.
struct RfPulse {
  Spin spin = Spin::proton;
  double phase = 0.0;
  double angle = 0.0;
  double nutation_hz = kIdealNutation;

  double duration() const;
  bool instantaneous() const { return duration() == 0.0; }
};

/// Free evolution under the internal Hamiltonian.
struct Delay {
  double duration = 0.0;
};

/// Switches the linear field gradient on (with strength in T/m) or off.
struct GradientToggle {
  bool on = false;
  double strength = 0.0;
};

using PulseEvent = std::variant<RfPulse, Delay, GradientToggle>;

struct TimedEvent {
  double start = 0.0;
  PulseEvent event;
};

/// Timed list of RF pulses, delays and gradient toggles.
class PulseSequence {
 public:
  /// Appends after everything already scheduled.
  PulseSequence& then(const PulseEvent& event);
  /// Starts together with the most recently appended event.
  PulseSequence& with(const PulseEvent& event);
  /// Appends every event of `other`, shifted to start at the current end.
  PulseSequence& then(const PulseSequence& other);

  const std::vector<TimedEvent>& events() const { return events_; }
  double duration() const { return end_; }
  bool empty() const { return events_.empty(); }

  /// One event per line: kind, spin, phase (deg), amplitude (Hz, or T/m
  /// for gradients), duration (s), start (s). Tab separated, with header.
  std::string to_table() const;

 private:
  std::vector<TimedEvent> events_;
  double end_ = 0.0;
  double last_start_ = 0.0;
};

/// Square-root-of-SWAP: three J delays of 1/(4J) interleaved with pi/2
/// rotations on both spins, y-conjugated, bare, then x-conjugated.
PulseSequence compile_collision(double j_hz, double nutation_hz);

/// Same layout as compile_collision with 1/(2J) delays; realizes SWAP.
PulseSequence compile_swap(double j_hz, double nutation_hz);

/// Ordered product of exp(-i H_k t_k) over the piecewise-constant intervals
/// of the sequence, H_k = internal + gradient + active RF terms. `position`
/// (m) is the voxel coordinate along the gradient.
/// Throws std::invalid_argument if two pulses on the same spin overlap.
Mat4 sequence_unitary(const PulseSequence& seq, const SpinSystem& sys, double position = 0.0);

/// |Tr(U^dagger V)| / 4. Throws std::invalid_argument for non-unitary input.
double gate_fidelity(const Mat4& u, const Mat4& v);

Mat4 sqrt_swap_gate();
Mat4 swap_gate();

}  // namespace qlg::spin
