#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace anofam {

// Error taxonomy. The CLI maps these onto exit codes; library users can
// catch the specific type they care about.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario / input validation problems.
struct ValidationError : Error {
    using Error::Error;
};

// Requested index lies outside the materialized window [-N, N].
struct WindowExceededError : Error {
    using Error::Error;
};

// Points handed to an operation live on mismatched components.
struct DomainError : Error {
    using Error::Error;
};

// Newton inversion of a torus map failed to converge.
struct InversionFailureError : Error {
    using Error::Error;
};

// Splitting power iteration could not separate E^s from E^u at the
// requested depth.
struct InsufficientDepthError : Error {
    double achievedResidual = 0.0;
    InsufficientDepthError(const std::string& msg, double residual)
        : Error(msg), achievedResidual(residual) {}
};

// omega_n <= 0: the family is too weakly hyperbolic for the chosen
// (gamma, lambdaTilde).
struct HyperbolicityMarginError : Error {
    int index = 0;
    HyperbolicityMarginError(const std::string& msg, int n) : Error(msg), index(n) {}
};

// Adapted-metric truncation tail above tolerance.
struct DepthInsufficientError : Error {
    using Error::Error;
};

// No feasible delta_n at some index.
struct ScheduleInfeasibleError : Error {
    int index = 0;
    ScheduleInfeasibleError(const std::string& msg, int n) : Error(msg), index(n) {}
};

// Charted image escapes the target injectivity ball.
struct CapViolationError : Error {
    int index = 0;
    CapViolationError(const std::string& msg, int n) : Error(msg), index(n) {}
};

// B^u(delta_{n+1}) not covered by r_n(B^u(delta_n)).
struct CoverageError : Error {
    int index = 0;
    CoverageError(const std::string& msg, int n) : Error(msg), index(n) {}
};

// Output graph violates the alpha-Lipschitz contract.
struct ContractViolationError : Error {
    using Error::Error;
};

// Fixed-point iteration exceeded maxSweeps.
struct NonConvergenceError : Error {
    std::vector<double> distanceTrace;
    NonConvergenceError(const std::string& msg, std::vector<double> trace)
        : Error(msg), distanceTrace(std::move(trace)) {}
};

// Sampling found a tangent vector breaking the claimed k,K equivalence.
struct NotUniformlyEquivalentError : Error {
    using Error::Error;
};

}  // namespace anofam
