#pragma once

#include <stdexcept>
#include <string>

namespace symtop {

/// Precondition violated by an argument (bad quantum numbers, empty grid, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid or unsupported configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The thermal sum is not converged at the requested J_max.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, int required_j_max)
        : std::runtime_error(what), required_j_max_(required_j_max) {}

    /// Smallest J_max that satisfies the tolerance, or -1 if none was found.
    int required_j_max() const noexcept { return required_j_max_; }

private:
    int required_j_max_;
};

/// Time step too coarse for the requested accuracy.
class StepSizeError : public std::runtime_error {
public:
    StepSizeError(const std::string& what, double suggested_dt_fs)
        : std::runtime_error(what), suggested_dt_fs_(suggested_dt_fs) {}

    double suggested_dt_fs() const noexcept { return suggested_dt_fs_; }

private:
    double suggested_dt_fs_;
};

/// Least-squares problem with no unique solution.
class DegenerateFitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace symtop
