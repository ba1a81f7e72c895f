#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dreg {

/// Base class for every error raised by the registration library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotARotation : public Error {
public:
    using Error::Error;
};

class DegenerateAverage : public Error {
public:
    using Error::Error;
};

class DegenerateTriad : public Error {
public:
    using Error::Error;
};

class DegenerateSet : public Error {
public:
    using Error::Error;
};

/// No model with enough support exists at the configured thresholds.
class NoConsensusFound : public Error {
public:
    using Error::Error;
};

class SpecInvalid : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class UnsupportedFormat : public Error {
public:
    using Error::Error;
};

/// Malformed input text; carries the 1-based line number of the offending line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace dreg
