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

#include "minobs/born.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>

#include "minobs/rng.hpp"

namespace minobs {

Rational Rational::of(long long num, long long den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

Rational Rational::operator+(const Rational& other) const {
  const long long g = std::gcd(den, other.den);
  const long long scaled = den / g * other.den;
  return Rational::of(num * (scaled / den) + other.num * (scaled / other.den),
                      scaled);
}

CountTable state_counts(const Povm& p) {
  CountTable table;
  for (std::size_t k = 1; k < p.component_count(); ++k) {
    const auto m = static_cast<std::uint64_t>(p.support(k).size());
    if (m == 0) {
      throw FixtureError("observable component " + std::to_string(k) +
                         " has an empty inverse image");
    }
    table.values.push_back(p.component(k).value());
    table.counts.push_back(m);
    table.total += m;
  }
  if (table.total == 0) {
    throw FixtureError("POVM has no observable states to count");
  }
  return table;
}

std::vector<double> born_probabilities(const CountTable& c) {
  if (c.total == 0) throw DomainError("count table with M = 0");
  std::vector<double> p;
  p.reserve(c.counts.size());
  for (std::uint64_t m : c.counts) {
    p.push_back(static_cast<double>(m) / static_cast<double>(c.total));
  }
  return p;
}

std::vector<Rational> born_probabilities_exact(const CountTable& c) {
  if (c.total == 0) throw DomainError("count table with M = 0");
  std::vector<Rational> p;
  p.reserve(c.counts.size());
  for (std::uint64_t m : c.counts) {
    p.push_back(Rational::of(static_cast<long long>(m),
                             static_cast<long long>(c.total)));
  }
  return p;
}

std::vector<double> amplitudes_from_counts(const CountTable& c) {
  std::vector<double> alpha;
  alpha.reserve(c.counts.size());
  for (double p : born_probabilities(c)) alpha.push_back(std::sqrt(p));
  return alpha;
}

FrequencyReport empirical_frequencies(const Povm& p, std::uint64_t trials,
                                      std::uint64_t seed) {
  if (trials == 0) throw DomainError("empirical_frequencies needs trials >= 1");
  const std::vector<std::uint32_t> domain = union_image(p);
  if (domain.empty()) {
    throw DomainError("POVM has an empty observable union; nothing to sample");
  }
  const CountTable table = state_counts(p);

  // Fixed-size chunks with derived seeds: the tally is a plain sum over
  // chunks, so any assignment of chunks to workers reproduces it.
  constexpr std::uint64_t kChunk = 8192;
  std::vector<std::uint64_t> tally(p.component_count(), 0);
  std::uint64_t done = 0;
  for (std::uint64_t chunk = 0; done < trials; ++chunk) {
    const std::uint64_t todo = std::min(kChunk, trials - done);
    SeededRng rng(stream_seed(seed, chunk));
    for (std::uint64_t i = 0; i < todo; ++i) {
      const FineState s{domain[rng.below(domain.size())]};
      tally[apply_component(p, s)] += 1;
    }
    done += todo;
  }

  FrequencyReport report;
  report.trials = trials;
  const auto theory = born_probabilities(table);
  for (std::size_t k = 1; k < p.component_count(); ++k) {
    FrequencyRow row;
    row.component = k;
    row.value = table.values[k - 1];
    row.count_m = table.counts[k - 1];
    row.p_theory = theory[k - 1];
    row.p_empirical =
        static_cast<double>(tally[k]) / static_cast<double>(trials);
    row.abs_error = std::abs(row.p_empirical - row.p_theory);
    report.max_abs_error = std::max(report.max_abs_error, row.abs_error);
    const double expected = row.p_theory * static_cast<double>(trials);
    const double diff = static_cast<double>(tally[k]) - expected;
    report.chi_square += diff * diff / expected;
    report.rows.push_back(row);
  }
  return report;
}

namespace {

void append_double(std::string& line, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  line.append(buf, res.ptr);
}

}  // namespace

void write_frequency_csv(const FrequencyReport& report, std::ostream& out) {
  out << "component,value,m_k,p_theory,p_empirical,abs_error\n";
  for (const auto& row : report.rows) {
    std::string line = std::to_string(row.component);
    line += ',';
    append_double(line, row.value);
    line += ',';
    line += std::to_string(row.count_m);
    line += ',';
    append_double(line, row.p_theory);
    line += ',';
    append_double(line, row.p_empirical);
    line += ',';
    append_double(line, row.abs_error);
    line += '\n';
    out << line;
  }
  if (!out) throw IoError("failed writing frequency CSV");
}

}  // namespace minobs
