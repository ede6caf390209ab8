// Copyright 2026 The QFL Authors.
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

namespace qfl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid sizes, counts or hyperparameters supplied at setup time.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Qubit or layer index outside the valid range.
class IndexError : public Error {
  public:
    using Error::Error;
};

/// Inconsistent arguments (length mismatch, control == target, ...).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Input value outside its documented domain, e.g. a feature not in [0, 1].
class ValidationError : public Error {
  public:
    using Error::Error;
};

/// Covariance requested for two non-commuting Paulis on the same qubit.
class UnsupportedPairingError : public Error {
  public:
    using Error::Error;
};

/// Malformed binary input (IDX files, cached datasets).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// Non-finite values produced during training.
class DivergenceError : public Error {
  public:
    using Error::Error;
};

/// Coordinator received a message set that does not match the federation.
class ProtocolError : public Error {
  public:
    using Error::Error;
};

} // namespace qfl
