#pragma once

#include <stdexcept>
#include <string>

namespace ecproc {

// Base of every error the toolkit throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid law, rule or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of an operation (no solution, bad interval).
class DomainError : public Error {
public:
    using Error::Error;
};

// Combination the toolkit does not support (e.g. Cech in d > 3).
class UnsupportedError : public Error {
public:
    using Error::Error;
};

// Enumeration exceeded its simplex budget.
class ResourceError : public Error {
public:
    using Error::Error;
};

// Monte Carlo error could not be pushed below the requested tolerance.
class PrecisionError : public Error {
public:
    PrecisionError(const std::string& what, double achieved)
        : Error(what), achieved_(achieved) {}
    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

}  // namespace ecproc
