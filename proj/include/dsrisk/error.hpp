#ifndef DSRISK_ERROR_HPP
#define DSRISK_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dsrisk {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inconsistent input data. Carries the 1-based line number
/// when the failure can be attributed to a line (0 otherwise).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Two objects that must share a shape (axes, dimensions) do not.
class StructuralError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A numerical invariant was violated by more than rounding can explain.
class NumericalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace dsrisk

#endif  // DSRISK_ERROR_HPP
