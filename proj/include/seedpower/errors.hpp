#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seedpower {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An iterative kernel failed to converge.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough observations for the requested estimator.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Zero standard error: the test statistic would be infinite.
class DegenerateSampleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input file could not be opened or read.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No sample size up to the search limit meets the type-II target.
class UnattainableError : public std::runtime_error {
public:
    UnattainableError(const std::string& what, int n_max, double beta_at_n_max)
        : std::runtime_error(what), n_max_(n_max), beta_at_n_max_(beta_at_n_max) {}

    int n_max() const noexcept { return n_max_; }
    double beta_at_n_max() const noexcept { return beta_at_n_max_; }

private:
    int n_max_;
    double beta_at_n_max_;
};

} // namespace seedpower
