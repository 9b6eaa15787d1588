#pragma once

#include <stdexcept>
#include <string>

namespace fraclab {

/// Argument outside the mathematical domain of an operation (e.g. lambda <= 0).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A numerical procedure failed to reach its tolerance (bracketing, quadrature, series).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Request outside what the implementation supports (derivative order, dimension).
struct CapabilityError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Invalid configuration, grid, or precondition on user-supplied data.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace fraclab
