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

#include "qlg/spin/pulse_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qlg/lattice.hpp"

namespace qlg::spin {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double event_duration(const PulseEvent& e) {
  return std::visit(
      [](const auto& ev) -> double {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, RfPulse>) return ev.duration();
        else if constexpr (std::is_same_v<T, Delay>) return ev.duration;
        else return 0.0;
      },
      e);
}

// Pulses on both spins at once, then a J delay.
void rotate_both(PulseSequence& seq, double phase, double nutation_hz) {
  const double quarter = 0.5 * std::numbers::pi;
  seq.then(RfPulse{Spin::proton, phase, quarter, nutation_hz});
  seq.with(RfPulse{Spin::carbon, phase, quarter, nutation_hz});
}

PulseSequence compile_heisenberg(double delay, double nutation_hz) {
  if (!(nutation_hz > 0.0)) throw std::invalid_argument("nutation rate must be positive");
  // Operator order right to left:
  //   [Rx(+) ZZ Rx(-)] ZZ [Ry(-) ZZ Ry(+)], each R a pi/2 on both spins,
  // where Rx(+) = exp(+i pi/4 sigma_x) and so on.
  PulseSequence seq;
  rotate_both(seq, phase::y, nutation_hz);
  seq.then(Delay{delay});
  rotate_both(seq, phase::minus_y, nutation_hz);
  seq.then(Delay{delay});
  rotate_both(seq, phase::minus_x, nutation_hz);
  seq.then(Delay{delay});
  rotate_both(seq, phase::x, nutation_hz);
  return seq;
}

struct RfTerm {
  double start;
  double end;
  RfPulse pulse;
};

}  // namespace

double RfPulse::duration() const {
  if (std::isinf(nutation_hz)) return 0.0;
  if (!(nutation_hz > 0.0)) throw std::invalid_argument("nutation rate must be positive");
  return std::abs(angle) / (kTwoPi * nutation_hz);
}

PulseSequence& PulseSequence::then(const PulseEvent& event) {
  const double d = event_duration(event);
  if (d < 0.0) throw std::invalid_argument("event duration must be non-negative");
  events_.push_back({end_, event});
  last_start_ = end_;
  end_ += d;
  return *this;
}

PulseSequence& PulseSequence::with(const PulseEvent& event) {
  const double d = event_duration(event);
  if (d < 0.0) throw std::invalid_argument("event duration must be non-negative");
  events_.push_back({last_start_, event});
  end_ = std::max(end_, last_start_ + d);
  return *this;
}

PulseSequence& PulseSequence::then(const PulseSequence& other) {
  const double offset = end_;
  for (const auto& e : other.events_) {
    events_.push_back({offset + e.start, e.event});
    last_start_ = offset + e.start;
  }
  end_ = offset + other.end_;
  return *this;
}

std::string PulseSequence::to_table() const {
  std::ostringstream out;
  out << "kind\tspin\tphase_deg\tamplitude\tduration_s\tstart_s\n";
  char buf[256];
  for (const auto& e : events_) {
    std::visit(
        [&](const auto& ev) {
          using T = std::decay_t<decltype(ev)>;
          if constexpr (std::is_same_v<T, RfPulse>) {
            std::snprintf(buf, sizeof buf, "rf_pulse\t%s\t%.17g\t%.17g\t%.17g\t%.17g\n",
                          ev.spin == Spin::proton ? "H" : "C",
                          ev.phase * 180.0 / std::numbers::pi, ev.nutation_hz, ev.duration(),
                          e.start);
          } else if constexpr (std::is_same_v<T, Delay>) {
            std::snprintf(buf, sizeof buf, "delay\t-\t-\t0\t%.17g\t%.17g\n", ev.duration,
                          e.start);
          } else {
            std::snprintf(buf, sizeof buf, "%s\t-\t-\t%.17g\t0\t%.17g\n",
                          ev.on ? "gradient_on" : "gradient_off", ev.strength, e.start);
          }
          out << buf;
        },
        e.event);
  }
  return out.str();
}

PulseSequence compile_collision(double j_hz, double nutation_hz) {
  if (!(j_hz > 0.0)) throw std::invalid_argument("J must be positive");
  return compile_heisenberg(1.0 / (4.0 * j_hz), nutation_hz);
}

PulseSequence compile_swap(double j_hz, double nutation_hz) {
  if (!(j_hz > 0.0)) throw std::invalid_argument("J must be positive");
  return compile_heisenberg(1.0 / (2.0 * j_hz), nutation_hz);
}

Mat4 sequence_unitary(const PulseSequence& seq, const SpinSystem& sys, double position) {
  std::vector<RfTerm> finite;
  std::vector<std::pair<double, RfPulse>> instant;
  std::vector<std::pair<double, GradientToggle>> toggles;
  std::set<double> cuts{0.0, seq.duration()};

  for (const auto& e : seq.events()) {
    if (const auto* p = std::get_if<RfPulse>(&e.event)) {
      if (p->instantaneous()) {
        instant.emplace_back(e.start, *p);
      } else {
        finite.push_back({e.start, e.start + p->duration(), *p});
        cuts.insert(e.start);
        cuts.insert(e.start + p->duration());
      }
    } else if (const auto* g = std::get_if<GradientToggle>(&e.event)) {
      toggles.emplace_back(e.start, *g);
      cuts.insert(e.start);
    } else {
      cuts.insert(e.start);
    }
  }
  for (std::size_t a = 0; a < finite.size(); ++a) {
    for (std::size_t b = a + 1; b < finite.size(); ++b) {
      if (finite[a].pulse.spin == finite[b].pulse.spin && finite[a].start < finite[b].end &&
          finite[b].start < finite[a].end) {
        throw std::invalid_argument("overlapping pulses on the same spin");
      }
    }
    for (const auto& [t, p] : instant) {
      if (p.spin == finite[a].pulse.spin && t > finite[a].start && t < finite[a].end) {
        throw std::invalid_argument("overlapping pulses on the same spin");
      }
    }
  }
  for (std::size_t a = 0; a < instant.size(); ++a) {
    for (std::size_t b = a + 1; b < instant.size(); ++b) {
      if (instant[a].second.spin == instant[b].second.spin &&
          instant[a].first == instant[b].first) {
        throw std::invalid_argument("overlapping pulses on the same spin");
      }
    }
  }
  for (const auto& [t, p] : instant) cuts.insert(t);

  std::stable_sort(instant.begin(), instant.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::stable_sort(toggles.begin(), toggles.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  const Mat4 sx1 = on_spin(Spin::proton, pauli_x());
  const Mat4 sy1 = on_spin(Spin::proton, pauli_y());
  const Mat4 sx2 = on_spin(Spin::carbon, pauli_x());
  const Mat4 sy2 = on_spin(Spin::carbon, pauli_y());

  Mat4 u = Mat4::Identity();
  double gradient = 0.0;
  std::size_t next_instant = 0;
  std::size_t next_toggle = 0;
  const std::vector<double> times(cuts.begin(), cuts.end());

  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t0 = times[k];
    while (next_toggle < toggles.size() && toggles[next_toggle].first <= t0) {
      const auto& g = toggles[next_toggle++].second;
      gradient = g.on ? g.strength : 0.0;
    }
    while (next_instant < instant.size() && instant[next_instant].first <= t0) {
      const RfPulse& p = instant[next_instant++].second;
      u = on_spin(p.spin, rf_rotation(p.phase, p.angle)) * u;
    }
    if (k + 1 == times.size()) break;
    const double t1 = times[k + 1];
    const double dt = t1 - t0;
    if (dt <= 0.0) continue;

    const double offset_h = sys.gamma_proton * gradient * position / kTwoPi;
    const double offset_c = offset_h / sys.gamma_ratio;
    Mat4 h = internal_hamiltonian(sys, offset_h, offset_c);
    const double mid = 0.5 * (t0 + t1);
    for (const auto& term : finite) {
      if (term.start <= mid && mid < term.end) {
        const double w = kTwoPi * term.pulse.nutation_hz * (term.pulse.angle < 0.0 ? -1.0 : 1.0);
        const double wx = w * std::cos(term.pulse.phase);
        const double wy = w * std::sin(term.pulse.phase);
        if (term.pulse.spin == Spin::proton) h -= 0.5 * (wx * sx1 + wy * sy1);
        else h -= 0.5 * (wx * sx2 + wy * sy2);
      }
    }
    u = expm_hermitian(h, dt) * u;
  }
  return u;
}

double gate_fidelity(const Mat4& u, const Mat4& v) {
  if (!is_unitary(u) || !is_unitary(v)) throw std::invalid_argument("gate_fidelity: non-unitary input");
  return std::min(1.0, std::abs((u.adjoint() * v).trace()) / 4.0);
}

Mat4 sqrt_swap_gate() { return qlg::CollisionOperator::sqrt_swap().matrix(); }

Mat4 swap_gate() { return qlg::swap_matrix(); }

}  // namespace qlg::spin
