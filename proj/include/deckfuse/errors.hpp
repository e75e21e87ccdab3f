#pragma once

#include <stdexcept>
#include <string>

namespace deckfuse {

// Base for all recoverable errors raised by the library. The CLI maps these
// to exit code 2; anything else escaping to main is an internal fault (3).
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input text (XML, CSV, config). Carries a position when known.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line = 0, std::size_t column = 0)
        : Error(format(msg, line, column)), line_(line), column_(column) {}
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& msg, std::size_t line, std::size_t column) {
        if (line == 0) return msg;
        std::string out = msg + " at line " + std::to_string(line);
        if (column != 0) out += ", column " + std::to_string(column);
        return out;
    }
    std::size_t line_;
    std::size_t column_;
};

// Well-formed input that does not match the documented schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

// Values that violate a domain invariant (non-positive dt, NaN sample, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A trace with no usable signal content (zero energy, zero delay).
class DegenerateSignalError : public Error {
public:
    using Error::Error;
};

// Cross-correlation peaked at a negative lag: received-before-input.
class CausalityError : public Error {
public:
    using Error::Error;
};

// Too few distinct values to cluster.
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

// Too few / collinear points for triangulation.
class DegenerateGeometryError : public Error {
public:
    using Error::Error;
};

// Pixel box has no overlap with the calibrated plot area.
class MappingError : public Error {
public:
    using Error::Error;
};

// Caller misuse: bad argument combinations, modality mismatch, bad config.
class UsageError : public Error {
public:
    using Error::Error;
};

// Filesystem-level failure (missing file, unwritable path).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace deckfuse
