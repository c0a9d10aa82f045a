// Copyright 2026 The qkdlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qkdlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Qudit dimension below 2, or a dit outside 0..d-1.
class InvalidDimension : public Error {
 public:
  using Error::Error;
};

/// Operands built over different dimensions.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Missing, duplicated, or otherwise incompatible wires.
class WireError : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be rational (a Born probability, a norm) is not.
class NotRational : public Error {
 public:
  using Error::Error;
};

/// An adversary hook broke the channel contract (e.g. swallowed the transit qudit).
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

/// A strategy hook was invoked out of its schedule.
class StrategyOrderError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant of a strategy failed; signals a broken schedule.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Announced dits that no key hypothesis explains.
class InconsistentTranscript : public Error {
 public:
  using Error::Error;
};

/// Bad configuration or arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qkdlab
