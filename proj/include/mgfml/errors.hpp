#pragma once

#include <stdexcept>
#include <string>

namespace mgfml {

/// Argument outside the mathematical domain of an operation, including mgf
/// evaluation points at or beyond the radius of convergence.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A quantity that is infinite or undefined for the requested parameters,
/// e.g. E_nu(0) with nu <= 1.
class DivergenceError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Adaptive quadrature failed to reach its tolerance.
class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fractional-order derivative requested for a prior family without a
/// fractional derivative route.
class UnsupportedFractional : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent dimensions between vectors, matrices, or series.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Request too large for the dense truncated-series path.
class SeriesSizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

/// Two algebraically equivalent forms disagreed beyond tolerance.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Model specification that cannot be expressed as a linear marginalization.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input table or configuration; the message names the location.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mgfml
