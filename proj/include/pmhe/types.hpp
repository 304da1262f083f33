#ifndef PMHE_TYPES_HPP
#define PMHE_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace pmhe {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Bad user-supplied configuration (dimensions, weights, constraint sets, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Mismatched vector/matrix sizes at call sites.
class DimensionError : public std::runtime_error {
public:
    explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical solver did not converge; carries the residual it got stuck at.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_ = 0.0;
};

// Offline design failure (unstable closed loop, unattainable pole set, LMI violation).
class DesignError : public std::runtime_error {
public:
    explicit DesignError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmhe

#endif  // PMHE_TYPES_HPP
