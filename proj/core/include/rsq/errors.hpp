#pragma once

#include <stdexcept>
#include <string>

namespace rsq {

// Invalid or out-of-range input (config files, parameter structs).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (integrator step underflow, non-finite state, ...).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A constrained search has an empty feasible set.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace rsq
