/*
 * Copyright (c) 2026 PhaseBridge Authors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <stdexcept>
#include <string>

namespace phasebridge {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad ring-and-barrier data or an out-of-range phase id.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A cyclic action referenced a pair outside the configured sequence.
class SequenceError : public Error {
public:
    using Error::Error;
};

/// Malformed action (switch bit not in {0,1}, fraction outside [0,1]).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// The requested pair fails the compatibility check.
class ConflictError : public Error {
public:
    using Error::Error;
};

/// Operation called in a state that does not allow it.
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace phasebridge
