#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tempest {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : std::runtime_error(what), estimate_(estimate), error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// An analytic inequality that must hold (phi <= 1) was violated beyond the allowed slack.
class ConsistencyError : public std::runtime_error {
public:
    ConsistencyError(const std::string& what, double x, double theta, double log_ratio)
        : std::runtime_error(what), x_(x), theta_(theta), log_ratio_(log_ratio) {}

    double x() const noexcept { return x_; }
    double theta() const noexcept { return theta_; }
    double log_ratio() const noexcept { return log_ratio_; }

private:
    double x_;
    double theta_;
    double log_ratio_;
};

/// Rejection loop hit its iteration cap.
class IterationLimitError : public std::runtime_error {
public:
    IterationLimitError(const std::string& what, std::uint64_t draws)
        : std::runtime_error(what), draws_(draws) {}

    std::uint64_t draws() const noexcept { return draws_; }

private:
    std::uint64_t draws_;
};

}  // namespace tempest
