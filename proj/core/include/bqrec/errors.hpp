#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bqrec {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An input lies outside the domain of a function (time outside the
/// interval, non-finite value, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed arguments: shape mismatches, invalid permutations, bad block sizes.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// A mathematical precondition of an operation does not hold. When the
/// violation is witnessed by a subset of inputs (anchors, rows) it is attached.
class PreconditionError : public Error {
public:
    explicit PreconditionError(const std::string& what, std::vector<std::size_t> subset = {})
        : Error(what), subset_(std::move(subset)) {}

    const std::vector<std::size_t>& offending_subset() const noexcept { return subset_; }

private:
    std::vector<std::size_t> subset_;
};

/// A request would exceed a configured resource cap (factorial enumeration).
class ResourceError : public Error {
public:
    using Error::Error;
};

/// The operation is not defined for the given basis kind.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// The linear system does not determine the unknowns uniquely.
class NonUniqueSolutionError : public Error {
public:
    NonUniqueSolutionError(const std::string& what, int rank, int required)
        : Error(what), rank_(rank), required_(required) {}

    int rank() const noexcept { return rank_; }
    int required_rank() const noexcept { return required_; }

private:
    int rank_;
    int required_;
};

/// Simulation parameters that cannot produce a valid run (e.g. a TEM bias that
/// does not dominate the signal).
class ConfigurationError : public Error {
public:
    using Error::Error;
};

}  // namespace bqrec
