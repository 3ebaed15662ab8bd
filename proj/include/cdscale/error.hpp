#pragma once

#include <stdexcept>
#include <string>

namespace cdscale {

// Base of every error raised by the library. The CLI maps subclasses to
// exit codes: invalid input (2), numerical failure (3), I/O failure (4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- invalid input ---------------------------------------------------------
class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ResolutionError : public Error {
public:
    using Error::Error;
};

class IncompatibleGrid : public Error {
public:
    using Error::Error;
};

// --- numerical failure -----------------------------------------------------
class ConvergenceError : public Error {
public:
    using Error::Error;
};

class SupportError : public Error {
public:
    using Error::Error;
};

class InstabilityError : public Error {
public:
    using Error::Error;
};

// --- I/O -------------------------------------------------------------------
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace cdscale
