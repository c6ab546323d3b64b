#ifndef ASDTORIC_ERRORS_HPP
#define ASDTORIC_ERRORS_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace asdtoric {

/// Input data violates a structural invariant (fan, conformal data, config).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation requested at a point where the closed forms are singular.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Metric is degenerate (torus determinant vanishes or metric not invertible).
class SingularMetricError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A branch of a square root could not be chosen consistently.
class BranchError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An extrapolation did not settle within tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation of a meromorphic map at one of its poles or zeros.
///
/// `order` is the pole order per component at the offending point; negative
/// entries are zeros.
class PoleError : public std::domain_error {
public:
    PoleError(const std::string& what, std::size_t factor, std::array<std::int64_t, 2> order)
        : std::domain_error(what), factor_(factor), order_(order) {}

    std::size_t factor() const noexcept { return factor_; }
    std::array<std::int64_t, 2> order() const noexcept { return order_; }

private:
    std::size_t factor_;
    std::array<std::int64_t, 2> order_;
};

} // namespace asdtoric

#endif // ASDTORIC_ERRORS_HPP
