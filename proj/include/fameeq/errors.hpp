// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace fameeq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Cholesky pivot was not strictly positive.
class NotPositiveDefinite : public Error {
public:
    using Error::Error;
};

/// |h_u^H x|^2 fell below the relative degeneracy threshold; the candidate
/// row cannot equalize user u.
class DegenerateDirection : public Error {
public:
    using Error::Error;
};

class InvalidBias : public Error {
public:
    using Error::Error;
};

class ZeroVector : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class NonpositiveVariance : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or fixture input. `line` is 1-based, 0 if unknown.
class ConfigError : public Error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : Error(msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

}  // namespace fameeq
