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

#include <stdexcept>
#include <string>

namespace minobs {

/// Base class for all minobs failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument outside an operation's domain (bad state index, dt <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A structurally invalid configuration (bad partition, malformed triple, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A fixture that violates its declared invariants (value collision, empty
/// observable image, weight outside [0,1], ...).
class FixtureError : public Error {
 public:
  using Error::Error;
};

/// Two non-NULL components of one observable fired on the same state.
class OrthogonalityError : public Error {
 public:
  using Error::Error;
};

/// A runtime invariant was broken (e.g. a reaction left the measured image).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / stream failure.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace minobs
