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

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "minobs/povm.hpp"

namespace minobs {

/// Exact fraction for normalization theorems; always reduced, den > 0.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long num, long long den);
  Rational operator+(const Rational& other) const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Per-component state counts m_k over the non-NULL components, with
/// M = sum of the m_k. Component k of the source POVM is counts index k-1.
struct CountTable {
  std::vector<double> values;        // outcome value per counted component
  std::vector<std::uint64_t> counts;  // m_k
  std::uint64_t total = 0;            // M
};

/// m_k = |Im^-1(a_k)| for k != 0, exact. Throws FixtureError when any
/// observable component has an empty image.
CountTable state_counts(const Povm& p);

/// p_k = m_k / M as doubles.
std::vector<double> born_probabilities(const CountTable& c);

/// p_k = m_k / M as exact reduced fractions; their sum is exactly 1.
std::vector<Rational> born_probabilities_exact(const CountTable& c);

/// alpha_k = sqrt(m_k / M); the squares sum to 1 within float round-off.
std::vector<double> amplitudes_from_counts(const CountTable& c);

struct FrequencyRow {
  std::size_t component = 0;
  double value = 0.0;
  std::uint64_t count_m = 0;
  double p_theory = 0.0;
  double p_empirical = 0.0;
  double abs_error = 0.0;
};

struct FrequencyReport {
  std::vector<FrequencyRow> rows;
  std::uint64_t trials = 0;
  double chi_square = 0.0;  // against the count-table probabilities
  double max_abs_error = 0.0;
};

/// Samples initial states uniformly from the union of the non-NULL inverse
/// images, applies the POVM per draw, and tallies outcome frequencies.
/// Trials are consumed in fixed-size chunks with derived per-chunk seeds, so
/// tallies merge identically regardless of how chunks are distributed.
FrequencyReport empirical_frequencies(const Povm& p, std::uint64_t trials,
                                      std::uint64_t seed);

/// CSV: component,value,m_k,p_theory,p_empirical,abs_error (header included).
void write_frequency_csv(const FrequencyReport& report, std::ostream& out);

}  // namespace minobs
