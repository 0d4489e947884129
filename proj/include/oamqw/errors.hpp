#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oamqw {

// Base for every error raised by the library. The CLI maps subclasses to
// exit codes (see tools/oamqw.cpp).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

// Amplitude would leave the truncated OAM window; the window must be enlarged.
class WindowOverflow : public Error {
public:
    using Error::Error;
};

class ZeroEfficiency : public Error {
public:
    using Error::Error;
};

class StageError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

class EmptyDistribution : public Error {
public:
    using Error::Error;
};

class InsufficientCounts : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class NegativeCount : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace oamqw
