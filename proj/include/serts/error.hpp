#pragma once

#include <stdexcept>
#include <string>

namespace serts {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid or inconsistent run configuration (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// File not readable/writable or malformed on disk (CLI exit code 2).
class IoError : public Error {
public:
    using Error::Error;
};

/// A completion could not be parsed into the expected tagged structure.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Backend unreachable after retries, or a scripted reply is missing.
class TransportError : public Error {
public:
    using Error::Error;
};

/// Internal invariant violated (orchestrator bug guard).
class InvariantError : public Error {
public:
    using Error::Error;
};

} // namespace serts
