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

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "minobs/born.hpp"
#include "minobs/errors.hpp"
#include "minobs/rng.hpp"

namespace minobs {

/// First-order hysteresis model of an information channel: impulses add
/// complex phasors to an accumulator that decays exponentially with time
/// constant R*C. C = 0 is the memoryless classical limit; the accumulator is
/// pinned to exactly zero by any positive evolve.
///
/// R and C are dimensionless simulation parameters; only their product is
/// behaviorally meaningful.
class RCChannel {
 public:
  RCChannel(double r, double c);

  /// Channel with R = 1 and C = tau, i.e. decoherence time tau directly.
  static RCChannel from_time_constant(double tau);

  /// accumulator += amplitude * e^{i*phase}; time unchanged.
  void impulse(double amplitude, double phase);

  /// Decays the accumulator over dt > 0 and advances the clock.
  void evolve(double dt);

  std::complex<double> accumulator() const { return accumulator_; }
  double magnitude() const { return std::abs(accumulator_); }
  double now() const { return now_; }
  double r() const { return r_; }
  double c() const { return c_; }
  double time_constant() const { return r_ * c_; }

 private:
  double r_ = 1.0;
  double c_ = 1.0;
  std::complex<double> accumulator_{0.0, 0.0};
  double now_ = 0.0;
};

/// Per-event phase: a fixed value or a seeded uniform draw from [0, 2*pi).
class PhaseSource {
 public:
  static PhaseSource fixed(double phase);
  static PhaseSource seeded(std::uint64_t seed);
  double next();

 private:
  std::optional<double> fixed_;
  SeededRng rng_{0};
};

/// An input impulse at an absolute time. When phase is unset, the sequence's
/// PhaseSource supplies it.
struct ImpulseEvent {
  double time = 0.0;
  double amplitude = 0.0;
  std::optional<double> phase;
};

struct TraceSample {
  double time = 0.0;
  std::complex<double> accumulator{0.0, 0.0};

  double magnitude() const { return std::abs(accumulator); }
};

/// Interleaves evolve and impulse over a time-ordered event list (equal times
/// allowed; decreasing times are a DomainError). The trace starts with the
/// channel's initial sample and adds one sample after each impulse.
std::vector<TraceSample> run_sequence(RCChannel ch,
                                      std::span<const ImpulseEvent> events,
                                      PhaseSource phases);

/// The coarse channel state: real amplitudes from state counts plus a phase
/// per component. Squares of the amplitudes sum to 1.
struct CoarseStateVector {
  std::vector<double> amplitudes;
  std::vector<double> phases;  // in [0, 2*pi)

  std::complex<double> component(std::size_t k) const {
    return std::polar(amplitudes[k], -phases[k]);
  }
};

CoarseStateVector coarse_vector(const CountTable& counts,
                                std::span<const double> phases);
CoarseStateVector coarse_vector(const CountTable& counts, std::uint64_t seed);

/// Least-squares fit of the decay time from log-magnitudes of a pure decay
/// trace. Samples at or below `floor` magnitude are ignored.
double fit_decay_time(std::span<const TraceSample> trace,
                      double floor = 1e-300);

/// CSV: time,re,im,magnitude (header included).
void write_trace_csv(std::span<const TraceSample> trace, std::ostream& out);

}  // namespace minobs
