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

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "minobs/rc_channel.hpp"
#include "minobs/rng.hpp"

using namespace minobs;

TEST_CASE("impulse: zero amplitude is a no-op, unit impulse lands exactly") {
  RCChannel ch(1.0, 2.0);
  ch.impulse(0.0, 1.3);
  CHECK(ch.accumulator() == std::complex<double>(0.0, 0.0));
  ch.impulse(1.0, 0.0);
  CHECK(ch.accumulator() == std::complex<double>(1.0, 0.0));
}

TEST_CASE("impulse: opposite phases interfere destructively") {
  RCChannel ch(1.0, 2.0);
  ch.impulse(1.0, 0.0);
  ch.impulse(1.0, std::numbers::pi);
  CHECK(ch.magnitude() <= 1e-15);
}

TEST_CASE("evolve: one decoherence time halves the log-magnitude") {
  RCChannel ch = RCChannel::from_time_constant(2.0);
  ch.impulse(1.0, 0.0);
  ch.evolve(2.0);
  CHECK(ch.magnitude() == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(ch.now() == 2.0);
}

TEST_CASE("evolve: the C=0 channel holds exactly nothing") {
  RCChannel ch(1.0, 0.0);
  ch.impulse(1.0, 0.7);
  ch.evolve(1e-9);
  CHECK(ch.accumulator() == std::complex<double>(0.0, 0.0));

  // a long event history never leaves residue
  SeededRng rng(6);
  for (int i = 0; i < 1000; ++i) {
    ch.impulse(rng.unit(), rng.angle());
    ch.evolve(rng.unit() + 1e-6);
    CHECK(ch.accumulator() == std::complex<double>(0.0, 0.0));
  }
}

TEST_CASE("evolve: semigroup identity within 1e-12") {
  RCChannel split = RCChannel::from_time_constant(3.0);
  split.impulse(1.0, 0.4);
  split.evolve(0.7);
  split.evolve(1.9);

  RCChannel whole = RCChannel::from_time_constant(3.0);
  whole.impulse(1.0, 0.4);
  whole.evolve(0.7 + 1.9);

  CHECK(std::abs(split.accumulator() - whole.accumulator()) <=
        1e-12 * whole.magnitude());
}

TEST_CASE("evolve and construction reject bad parameters") {
  RCChannel ch(1.0, 1.0);
  CHECK_THROWS_AS(ch.evolve(0.0), DomainError);
  CHECK_THROWS_AS(ch.evolve(-1.0), DomainError);
  CHECK_THROWS_AS(RCChannel(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(RCChannel(-1.0, 1.0), DomainError);
  CHECK_THROWS_AS(RCChannel(1.0, -0.5), DomainError);
}

TEST_CASE("impulse response: e^{-t/RC} to 1e-9 over ten decoherence times") {
  const double tau = 2.0;
  RCChannel ch = RCChannel::from_time_constant(tau);
  ch.impulse(1.0, 0.0);
  const int steps = 400;
  const double dt = 10.0 * tau / steps;
  for (int i = 1; i <= steps; ++i) {
    ch.evolve(dt);
    const double expected = std::exp(-ch.now() / tau);
    CHECK(std::abs(ch.magnitude() - expected) / expected <= 1e-9);
  }
}

TEST_CASE("decay is monotone without impulses") {
  RCChannel ch = RCChannel::from_time_constant(1.5);
  ch.impulse(1.0, 2.2);
  double previous = ch.magnitude();
  for (int i = 0; i < 100; ++i) {
    ch.evolve(0.05);
    CHECK(ch.magnitude() <= previous);
    previous = ch.magnitude();
  }
}

TEST_CASE("run_sequence: no events yields a flat zero trace") {
  const auto trace = run_sequence(RCChannel::from_time_constant(1.0), {},
                                  PhaseSource::fixed(0.0));
  REQUIRE(trace.size() == 1);
  CHECK(trace[0].magnitude() == 0.0);
}

TEST_CASE("run_sequence: coherent impulses inside RC charge monotonically") {
  const double tau = 1.0;
  std::vector<ImpulseEvent> events;
  for (int j = 0; j < 10; ++j) {
    events.push_back({0.1 * static_cast<double>(j + 1), 1.0, std::nullopt});
  }
  const auto trace = run_sequence(RCChannel::from_time_constant(tau), events,
                                  PhaseSource::fixed(0.0));
  REQUIRE(trace.size() == 11);

  // direct recursion oracle: m_{n+1} = m_n * e^{-0.1} + 1
  double m = 0.0;
  for (std::size_t j = 1; j < trace.size(); ++j) {
    m = m * std::exp(-0.1) + 1.0;
    CHECK(trace[j].magnitude() == doctest::Approx(m).epsilon(1e-12));
    CHECK(trace[j].magnitude() > trace[j - 1].magnitude());
  }
}

TEST_CASE("run_sequence: explicit per-event phases override the source") {
  std::vector<ImpulseEvent> events = {{0.0, 1.0, 0.0},
                                      {0.0, 1.0, std::numbers::pi}};
  const auto trace = run_sequence(RCChannel::from_time_constant(5.0), events,
                                  PhaseSource::seeded(4));
  CHECK(trace.back().magnitude() <= 1e-15);
}

TEST_CASE("run_sequence: unordered events raise a domain error") {
  std::vector<ImpulseEvent> events = {{1.0, 1.0, std::nullopt},
                                      {0.5, 1.0, std::nullopt}};
  CHECK_THROWS_AS(run_sequence(RCChannel::from_time_constant(1.0), events,
                               PhaseSource::fixed(0.0)),
                  DomainError);
}

TEST_CASE("linearity: superposed impulse trains add their responses") {
  const double tau = 2.0;
  std::vector<ImpulseEvent> first = {{0.2, 1.0, 0.3}, {0.9, 0.5, 1.2}};
  std::vector<ImpulseEvent> second = {{0.2, 0.7, 2.0}, {0.9, 1.1, 4.0}};
  std::vector<ImpulseEvent> merged = {{0.2, 1.0, 0.3},
                                      {0.2, 0.7, 2.0},
                                      {0.9, 0.5, 1.2},
                                      {0.9, 1.1, 4.0}};
  const auto t1 = run_sequence(RCChannel::from_time_constant(tau), first,
                               PhaseSource::fixed(0.0));
  const auto t2 = run_sequence(RCChannel::from_time_constant(tau), second,
                               PhaseSource::fixed(0.0));
  const auto tm = run_sequence(RCChannel::from_time_constant(tau), merged,
                               PhaseSource::fixed(0.0));
  const auto sum = t1.back().accumulator + t2.back().accumulator;
  CHECK(std::abs(tm.back().accumulator - sum) <= 1e-12);
}

TEST_CASE("random-phase cancellation: phasor mean shrinks like 1/sqrt(K)") {
  // The channel burst with negligible internal decay must agree with a
  // direct 2-D random-walk computation, and the per-impulse mean must fall
  // under 3/sqrt(K) for nearly every seed.
  const std::uint64_t kImpulses = 2000;
  const double bound = 3.0 / std::sqrt(static_cast<double>(kImpulses));
  int within = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const std::uint64_t seed = stream_seed(505, i);

    std::vector<ImpulseEvent> events(kImpulses);
    for (std::uint64_t j = 0; j < kImpulses; ++j) {
      events[j] = {0.0, 1.0, std::nullopt};  // simultaneous: zero decay
    }
    const auto trace = run_sequence(RCChannel::from_time_constant(1.0), events,
                                    PhaseSource::seeded(seed));

    // independent random-walk oracle with the same phase stream
    SeededRng rng(seed);
    std::complex<double> walk{0.0, 0.0};
    for (std::uint64_t j = 0; j < kImpulses; ++j) {
      walk += std::polar(1.0, rng.angle());
    }
    CHECK(std::abs(trace.back().accumulator - walk) <= 1e-9);

    const double mean = trace.back().magnitude() / static_cast<double>(kImpulses);
    if (mean <= bound) ++within;
  }
  CHECK(within >= 95);
}

TEST_CASE("coarse_vector: amplitudes from counts, explicit phases") {
  const CountTable even{{1.0, 2.0}, {1, 1}, 2};
  const double phases[] = {0.0, 0.0};
  const auto v = coarse_vector(even, phases);
  CHECK(v.amplitudes[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
  CHECK(v.amplitudes[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));

  const CountTable uneven{{1.0, 2.0}, {3, 1}, 4};
  const auto u = coarse_vector(uneven, phases);
  CHECK(u.amplitudes[0] == doctest::Approx(std::sqrt(0.75)).epsilon(1e-14));
  CHECK(u.amplitudes[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("coarse_vector: seeded phases normalize and land in [0, 2pi)") {
  SeededRng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    CountTable c;
    const int parts = 2 + static_cast<int>(rng.below(4));
    for (int k = 0; k < parts; ++k) {
      c.values.push_back(static_cast<double>(k + 1));
      c.counts.push_back(1 + rng.below(100));
      c.total += c.counts.back();
    }
    const auto v = coarse_vector(c, rng.next_u64());
    double norm = 0.0;
    for (double a : v.amplitudes) norm += a * a;
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
    for (double phi : v.phases) {
      CHECK(phi >= 0.0);
      CHECK(phi < 2.0 * std::numbers::pi);
    }
  }
}

TEST_CASE("coarse_vector: phase count must match the components") {
  const CountTable c{{1.0, 2.0}, {1, 1}, 2};
  const double one_phase[] = {0.0};
  CHECK_THROWS_AS(coarse_vector(c, std::span<const double>(one_phase, 1)),
                  DomainError);
}

TEST_CASE("fit_decay_time recovers the configured constant") {
  const double tau = 0.37;
  RCChannel ch = RCChannel::from_time_constant(tau);
  ch.impulse(2.0, 1.0);
  std::vector<TraceSample> trace;
  trace.push_back({ch.now(), ch.accumulator()});
  for (int i = 0; i < 100; ++i) {
    ch.evolve(tau / 10.0);
    trace.push_back({ch.now(), ch.accumulator()});
  }
  CHECK(fit_decay_time(trace) == doctest::Approx(tau).epsilon(1e-9));
}

TEST_CASE("trace CSV has the declared columns") {
  RCChannel ch = RCChannel::from_time_constant(1.0);
  ch.impulse(1.0, 0.0);
  std::vector<TraceSample> trace = {{0.0, ch.accumulator()}};
  std::ostringstream out;
  write_trace_csv(trace, out);
  CHECK(out.str().rfind("time,re,im,magnitude\n", 0) == 0);
  CHECK(out.str().find("0,1,0,1\n") != std::string::npos);
}
