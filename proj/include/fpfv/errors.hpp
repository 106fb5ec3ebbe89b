#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpfv {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments: dimension mismatch, degenerate box, index out of range, ...
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// Two objects that must live on the same (or a refined) grid do not.
class GridMismatch : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class ZeroMass : public Error {
public:
    using Error::Error;
};

// The requested time step makes some diagonal entry of S negative.
class CflViolation : public Error {
public:
    CflViolation(std::size_t binding_cell, double dt, double dt_max)
        : Error("CFL violation: dt=" + std::to_string(dt) + " exceeds dt_max=" +
                std::to_string(dt_max) + " (binding cell " + std::to_string(binding_cell) + ")"),
          binding_cell_(binding_cell), dt_(dt), dt_max_(dt_max) {}

    std::size_t binding_cell() const noexcept { return binding_cell_; }
    double dt() const noexcept { return dt_; }
    double dt_max() const noexcept { return dt_max_; }

private:
    std::size_t binding_cell_;
    double dt_;
    double dt_max_;
};

class NoConvergence : public Error {
public:
    NoConvergence(std::size_t iterations, double residual)
        : Error("power iteration did not converge after " + std::to_string(iterations) +
                " iterations (residual " + std::to_string(residual) + ")"),
          iterations_(iterations), residual_(residual) {}

    std::size_t iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t iterations_;
    double residual_;
};

// Observation is incompatible with the predicted density.
class ZeroEvidence : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace fpfv
