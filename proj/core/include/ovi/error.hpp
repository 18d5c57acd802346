#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ovi {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number of the offending row.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a data invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration or missing configured resource (e.g. benchmark asset).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Arguments outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Panels or series whose shapes do not line up.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A statistic that is not defined for the given data (zero variance, zero bets, ...).
class UndefinedStatisticError : public Error {
public:
    using Error::Error;
};

/// Observed option price outside the no-arbitrage band.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// Iterative solver that failed to reach its tolerance.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Data that admits no meaningful model fit.
class DegenerateFitError : public Error {
public:
    using Error::Error;
};

}  // namespace ovi
