#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace ggp {

// Thrown when a matrix that must be symmetric positive definite is not,
// e.g. a Cholesky factorization fails or a Schur complement falls at or
// below the jitter floor. Carries the offending pivot when known.
class NotPositiveDefiniteError : public std::runtime_error {
public:
    explicit NotPositiveDefiniteError(const std::string& what,
                                      double schur_complement = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), schur_(schur_complement) {}

    // The Schur complement (or pivot) that triggered the failure; NaN if unknown.
    double schur_complement() const { return schur_; }

private:
    double schur_;
};

// Thrown on malformed text input (CSV rows, config records). line() is the
// 1-based line number in the source file.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace ggp
