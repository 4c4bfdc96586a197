#pragma once

#include <stdexcept>
#include <string>

namespace drmv {

struct ShapeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct LengthMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NegativeWeight : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct TooManyAtoms : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotPsd : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fixed-point iteration ran out of budget. Carries the last observed
// residual so callers can distinguish slow convergence from divergence.
struct NoConvergence : std::runtime_error {
    NoConvergence(const std::string& what, int iterations_done, double last_residual)
        : std::runtime_error(what), iterations(iterations_done), residual(last_residual) {}
    int iterations;
    double residual;
};

// Invalid configuration or instance document.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace drmv
