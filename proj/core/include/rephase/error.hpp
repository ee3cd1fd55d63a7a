#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace rephase {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain an operation accepts.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Thrust direction is undefined because the primer vector vanishes.
class SingularDirectionError : public Error {
public:
    SingularDirectionError(const std::string& what, double where)
        : Error(what), longitude(where) {}
    double longitude;
};

/// The ODE integrator could not reach the end of its span.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double t, std::vector<double> y)
        : Error(what), last_t(t), last_state(std::move(y)) {}
    double last_t;
    std::vector<double> last_state;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double estimate, double error)
        : Error(what), estimate(estimate), error(error) {}
    double estimate;
    double error;
};

/// A scalar root could not be bracketed or refined.
class RootFindError : public Error {
public:
    using Error::Error;
};

/// A multidimensional solve stalled or ran out of iterations.
class NonconvergenceError : public Error {
public:
    NonconvergenceError(const std::string& what, std::vector<double> z,
                        std::vector<double> residual, int iterations,
                        std::vector<double> history = {})
        : Error(what), last_point(std::move(z)), last_residual(std::move(residual)),
          iterations(iterations), residual_history(std::move(history)) {}
    std::vector<double> last_point;
    std::vector<double> last_residual;
    int iterations;
    /// Max-norm residual at the seed and at every accepted iterate.
    std::vector<double> residual_history;
};

/// Requested transfer cannot be flown in the prescribed longitude span.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double min_delta_L)
        : Error(what), min_delta_L(min_delta_L) {}
    double min_delta_L;
};

/// Malformed or incompatible atlas file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
          line(line) {}
    long line;
};

}  // namespace rephase
