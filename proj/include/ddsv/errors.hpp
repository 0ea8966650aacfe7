#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ddsv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a semantic rule (empty book, bad weight, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Index or maturity outside the range covered by a curve or grid.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Loading vector of a segment vanished while the correlation numerator did not.
class DegenerateLoadingError : public Error {
public:
    using Error::Error;
};

/// Non-finite intermediate in a recursion; `segment` is the offending segment index.
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t segment)
        : Error(what + " (segment " + std::to_string(segment) + ")"), segment_(segment) {}

    std::size_t segment() const noexcept { return segment_; }

private:
    std::size_t segment_;
};

/// Nelder-Mead could not build a simplex with at least one finite vertex.
class InitializationError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace detail
}  // namespace ddsv
