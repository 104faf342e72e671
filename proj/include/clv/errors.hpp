#pragma once

#include <stdexcept>
#include <string>

namespace clv {

// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Ambient dimensions of two objects do not match.
class DimensionError : public Error {
public:
    using Error::Error;
};

// NaN/Inf input where finite values are required.
class NumericError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// A tuple that must be linearly independent is (numerically) rank deficient.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

// Alternating projections did not reach the requested tolerance.
class IterationLimitError : public Error {
public:
    IterationLimitError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// A time series (or its tail) consists entirely of underflowed values.
class SaturationError : public Error {
public:
    using Error::Error;
};

// A (t1,t2) grid does not carry enough distinct min(t1,t2) values.
class CoverageError : public Error {
public:
    using Error::Error;
};

// Reference tuple is not an orthonormal basis.
class ReferenceError : public Error {
public:
    using Error::Error;
};

// A vector violates the span constraint of the extendable-admissibility domain.
class BlockDomainError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

// Rank collapse at a QR step of the forward phase.
class CollapseError : public Error {
public:
    using Error::Error;
};

// Triangular back-substitution became too ill-conditioned.
class StabilityError : public Error {
public:
    using Error::Error;
};

// Intersection of evolved subspaces has the wrong dimension.
class TransversalityError : public Error {
public:
    using Error::Error;
};

// Matrix entries exceeded the representable range during propagation.
class CocycleOverflowError : public Error {
public:
    using Error::Error;
};

// Requested analytic data for a cocycle that has none.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Config parsing / validation failure (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace clv
