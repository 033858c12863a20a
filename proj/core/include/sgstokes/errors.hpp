#pragma once

#include <stdexcept>
#include <string>

namespace sgstokes {

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Requested problem size exceeds a configured cap.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration value or inconsistent argument combination.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Finite element assembly produced a non-finite value.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Bisection bracket failure in the analytic eigenpair solver.
class RootFindError : public Error {
public:
    RootFindError(const std::string& what, double lo, double hi)
        : Error(what + " [bracket " + std::to_string(lo) + ", " + std::to_string(hi) + "]"),
          bracket_lo(lo), bracket_hi(hi) {}
    double bracket_lo;
    double bracket_hi;
};

/// Lanczos eigenvalue estimation stopped before reaching the requested tolerance.
class EigEstimateError : public Error {
public:
    EigEstimateError(const std::string& what, double best)
        : Error(what), best_estimate(best) {}
    double best_estimate;
};

/// Loss of positivity of the non-standard inner product during the CG iteration.
class InnerProductError : public Error {
public:
    InnerProductError(const std::string& what, double scaling_a, double rayleigh)
        : Error(what), scaling_a(scaling_a), rayleigh(rayleigh) {}
    double scaling_a;
    double rayleigh;
};

}  // namespace sgstokes
