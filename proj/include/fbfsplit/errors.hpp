#pragma once

#include <stdexcept>
#include <string>

namespace fbfsplit {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class DimensionError : public Error {
public:
    DimensionError(const std::string& where, long expected, long got)
        : Error(where + ": dimension mismatch, expected " + std::to_string(expected) +
                ", got " + std::to_string(got)) {}
};

class InvalidMetricError : public Error {
public:
    using Error::Error;
};

// Thrown when a metric is singular to working tolerance; message carries a
// condition-number estimate.
class SingularMetricError : public Error {
public:
    explicit SingularMetricError(double cond_estimate)
        : Error("metric is singular to tolerance (condition estimate " +
                std::to_string(cond_estimate) + ")"),
          cond_estimate(cond_estimate) {}
    double cond_estimate;
};

class StepSizeError : public Error {
public:
    using Error::Error;
};

// A non-finite value appeared inside an iteration substep.
class NonFiniteError : public Error {
public:
    explicit NonFiniteError(const std::string& substep)
        : Error("non-finite value in substep '" + substep + "'"), substep(substep) {}
    std::string substep;
};

// Divergence guard: the iterate norm exceeded 1e6 * (1 + ||x0||).  Usually a
// symptom of a wrong Lipschitz constant or an invalid step size.
class DivergenceError : public Error {
public:
    DivergenceError(std::size_t iteration, double norm, double bound)
        : Error("divergence guard tripped at iteration " + std::to_string(iteration) +
                ": ||x|| = " + std::to_string(norm) + " > " + std::to_string(bound) +
                " (check the declared Lipschitz constant and step sizes)"),
          iteration(iteration), norm(norm), bound(bound) {}
    std::size_t iteration;
    double norm;
    double bound;
};

class UnsupportedCombinationError : public Error {
public:
    using Error::Error;
};

class CertificationError : public Error {
public:
    using Error::Error;
};

class UnknownOperatorError : public Error {
public:
    explicit UnknownOperatorError(const std::string& name)
        : Error("unknown operator '" + name + "' (not in registry)"), name(name) {}
    std::string name;
};

}  // namespace fbfsplit
