#pragma once

#include <stdexcept>
#include <string>

namespace loewner_lab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller supplied arguments that violate a documented precondition.
struct InvalidArgument : Error {
    using Error::Error;
};

// Formula evaluated outside the parameter range where it holds.
struct DomainError : Error {
    using Error::Error;
};

// Adaptive integrator could not reach the requested tolerance.
struct StepFailure : Error {
    using Error::Error;
};

// Query point was absorbed by the hull before the requested time.
struct Swallowed : Error {
    using Error::Error;
    double tau = 0.0;
    Swallowed(const std::string& what, double t) : Error(what), tau(t) {}
};

struct CuspReached : Error {
    using Error::Error;
    double t = 0.0;
    CuspReached(const std::string& what, double time) : Error(what), t(time) {}
    explicit CuspReached(double time) : Error("cusp reached at t = " + std::to_string(time)), t(time) {}
};

struct DerivativeUnderflow : Error {
    using Error::Error;
};

struct DivergentSeries : Error {
    using Error::Error;
};

struct DegenerateFit : Error {
    using Error::Error;
};

struct Undecided : Error {
    using Error::Error;
};

}  // namespace loewner_lab
