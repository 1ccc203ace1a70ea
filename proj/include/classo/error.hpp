#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace classo {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

class NotPositiveDefinite : public Error {
public:
    NotPositiveDefinite(std::size_t pivot_index, double pivot);
    const char* kind() const noexcept override { return "NotPositiveDefinite"; }
    std::size_t pivot_index() const noexcept { return pivot_index_; }
    double pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_index_;
    double pivot_;
};

/// Raised when a linear system is numerically singular. Carries the
/// reciprocal condition estimate that triggered the failure.
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, double rcond);
    const char* kind() const noexcept override { return "SingularSystem"; }
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "DimensionMismatch"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "ConfigError"; }
};

class NonConverged : public Error {
public:
    NonConverged(const std::string& what, double kkt_violation,
                 std::optional<std::size_t> column = std::nullopt);
    const char* kind() const noexcept override { return "NonConverged"; }
    double kkt_violation() const noexcept { return kkt_violation_; }
    std::optional<std::size_t> column() const noexcept { return column_; }

private:
    double kkt_violation_;
    std::optional<std::size_t> column_;
};

class DegenerateResidual : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "DegenerateResidual"; }
};

/// Input file problems. Row and column are 1-based positions in the file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t col);
    const char* kind() const noexcept override { return "ParseError"; }
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class NonFiniteValue : public ParseError {
public:
    NonFiniteValue(std::size_t row, std::size_t col);
    const char* kind() const noexcept override { return "NonFiniteValue"; }
};

}  // namespace classo
