#pragma once

#include <stdexcept>
#include <string>

namespace igeo {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Iterative solver failed to meet its tolerance; signals misconfiguration.
struct NumericsError : Error {
    using Error::Error;
};

// Vector lengths or sample spaces do not match.
struct ShapeError : Error {
    using Error::Error;
};

// Operation requires a measure with unit mass.
struct NotProbabilityError : Error {
    using Error::Error;
};

struct InvalidAlphaError : Error {
    using Error::Error;
};

// A vector field lacks a directional-derivative callback and the
// finite-difference fallback is disabled.
struct MissingDerivativeError : Error {
    using Error::Error;
};

struct SingularGramError : Error {
    using Error::Error;
};

struct SingularMetricError : Error {
    using Error::Error;
};

struct DependentGeneratorsError : Error {
    using Error::Error;
};

// Parameter point or path leaves the family's domain box.
struct OutOfDomainError : Error {
    using Error::Error;
};

// Invalid CLI configuration or input file.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace igeo
