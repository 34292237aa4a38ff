#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace doherty {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument value (nonpositive component value, out-of-range drive, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Input lies outside the region where a closed form is defined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Requested feature or size is outside what the toolkit supports.
class UnsupportedError : public Error {
public:
    using Error::Error;
};

/// A relation that must hold by construction was violated.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// The nodal system has no unique solution. `offender()` names the node or
/// element whose unknown spans the null space.
class SingularSystemError : public Error {
public:
    SingularSystemError(const std::string& what, std::string offender)
        : Error(what), offender_(std::move(offender)) {}

    const std::string& offender() const noexcept { return offender_; }

private:
    std::string offender_;
};

}  // namespace doherty
