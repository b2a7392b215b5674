#ifndef PEULER_ERRORS_HPP
#define PEULER_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace peuler {

// Nonlinear solve failed or a construction invariant was breached.
// Carries enough context (cell coordinates, residuals) to reproduce the case.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration rejected: names the violated hypothesis (condition-M,
// condition-X, IC, BC, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace peuler

#endif
