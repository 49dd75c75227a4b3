// Copyright 2026 The minobs authors
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

#include "minobs/rc_channel.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace minobs {

RCChannel::RCChannel(double r, double c) : r_(r), c_(c) {
  if (!(r > 0.0) || !std::isfinite(r)) {
    throw DomainError("R must be a positive finite real");
  }
  if (c < 0.0 || !std::isfinite(c)) {
    throw DomainError("C must be a non-negative finite real");
  }
}

RCChannel RCChannel::from_time_constant(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    throw DomainError("time constant must be a non-negative finite real");
  }
  return RCChannel(1.0, tau);
}

void RCChannel::impulse(double amplitude, double phase) {
  if (!std::isfinite(amplitude) || !std::isfinite(phase)) {
    throw DomainError("impulse amplitude and phase must be finite");
  }
  accumulator_ += std::polar(amplitude, phase);
}

void RCChannel::evolve(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw DomainError("evolve needs dt > 0");
  }
  now_ += dt;
  if (c_ == 0.0) {
    // Memoryless classical limit: no residue survives a positive interval.
    accumulator_ = {0.0, 0.0};
    return;
  }
  accumulator_ *= std::exp(-dt / (r_ * c_));
}

PhaseSource PhaseSource::fixed(double phase) {
  PhaseSource s;
  s.fixed_ = phase;
  return s;
}

PhaseSource PhaseSource::seeded(std::uint64_t seed) {
  PhaseSource s;
  s.rng_ = SeededRng(seed);
  return s;
}

double PhaseSource::next() {
  if (fixed_) return *fixed_;
  return rng_.angle();
}

std::vector<TraceSample> run_sequence(RCChannel ch,
                                      std::span<const ImpulseEvent> events,
                                      PhaseSource phases) {
  std::vector<TraceSample> trace;
  trace.reserve(events.size() + 1);
  trace.push_back({ch.now(), ch.accumulator()});

  double last = ch.now();
  for (const ImpulseEvent& ev : events) {
    if (ev.time < last) {
      throw DomainError("impulse events must be time-ordered");
    }
    if (ev.time > last) {
      ch.evolve(ev.time - last);
      last = ev.time;
    }
    ch.impulse(ev.amplitude, ev.phase ? *ev.phase : phases.next());
    trace.push_back({ch.now(), ch.accumulator()});
  }
  return trace;
}

CoarseStateVector coarse_vector(const CountTable& counts,
                                std::span<const double> phases) {
  if (phases.size() != counts.counts.size()) {
    throw DomainError("coarse_vector needs one phase per counted component");
  }
  CoarseStateVector v;
  v.amplitudes = amplitudes_from_counts(counts);
  v.phases.assign(phases.begin(), phases.end());
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (double& phi : v.phases) {
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0) phi += kTwoPi;
  }
  return v;
}

CoarseStateVector coarse_vector(const CountTable& counts, std::uint64_t seed) {
  SeededRng rng(seed);
  std::vector<double> phases(counts.counts.size());
  for (double& phi : phases) phi = rng.angle();
  return coarse_vector(counts, phases);
}

double fit_decay_time(std::span<const TraceSample> trace, double floor) {
  // Ordinary least squares of ln|acc| against t; tau = -1/slope.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const TraceSample& s : trace) {
    const double mag = s.magnitude();
    if (mag <= floor) continue;
    const double y = std::log(mag);
    sx += s.time;
    sy += y;
    sxx += s.time * s.time;
    sxy += s.time * y;
    ++n;
  }
  if (n < 2) throw DomainError("decay fit needs at least two usable samples");
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  if (denom == 0.0) throw DomainError("decay fit needs distinct sample times");
  const double slope = (static_cast<double>(n) * sxy - sx * sy) / denom;
  if (!(slope < 0.0)) {
    throw DomainError("trace does not decay; cannot fit a time constant");
  }
  return -1.0 / slope;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

}  // namespace

void write_trace_csv(std::span<const TraceSample> trace, std::ostream& out) {
  out << "time,re,im,magnitude\n";
  for (const TraceSample& s : trace) {
    std::string line;
    append_double(line, s.time);
    line += ',';
    append_double(line, s.accumulator.real());
    line += ',';
    append_double(line, s.accumulator.imag());
    line += ',';
    append_double(line, s.magnitude());
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing trace CSV");
}

}  // namespace minobs
