#pragma once

#include <stdexcept>
#include <string>

namespace gfactor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A distribution or routine was called with parameters outside its domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Factorization failure, non-finite update, or another numerical breakdown.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Not enough samples for the requested summary.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent input data (files, dimensions, pedigrees).
class DataError : public Error {
public:
    using Error::Error;
};

/// A trait with zero variance where a ratio over that variance was requested.
class DegenerateTraitError : public Error {
public:
    DegenerateTraitError(const std::string& what, std::size_t trait)
        : Error(what), trait_(trait) {}
    std::size_t trait() const noexcept { return trait_; }

private:
    std::size_t trait_;
};

/// Invalid run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace gfactor
