#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace edgelab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter lies outside its admissible domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A caller violated an input contract (unsorted sample, length mismatch, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class SampleSizeError : public Error {
public:
    using Error::Error;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class InputLengthError : public Error {
public:
    using Error::Error;
};

class CoverageError : public Error {
public:
    using Error::Error;
};

class MomentBudgetError : public Error {
public:
    using Error::Error;
};

/// Simulation produced a non-finite volatility.
class DivergenceError : public Error {
public:
    DivergenceError(std::ptrdiff_t index, const std::string& what)
        : Error(what), index_(index) {}

    /// Time index of the first non-finite value (negative inside burn-in).
    std::ptrdiff_t index() const noexcept { return index_; }

private:
    std::ptrdiff_t index_;
};

/// Quadrature did not reach the requested tolerance.
class AccuracyError : public Error {
public:
    AccuracyError(double estimate, double error, const std::string& what)
        : Error(what), estimate_(estimate), error_(error) {}

    double estimate() const noexcept { return estimate_; }
    double error() const noexcept { return error_; }

private:
    double estimate_;
    double error_;
};

/// Requested third cumulant cannot be carried by the Gaussian-plus-Gamma law.
class InfeasibleError : public Error {
public:
    InfeasibleError(double max_abs_k3, const std::string& what)
        : Error(what), max_abs_k3_(max_abs_k3) {}

    double max_abs_k3() const noexcept { return max_abs_k3_; }

private:
    double max_abs_k3_;
};

/// Experiment configuration failed validation; `field()` is a dotted path.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace edgelab
