#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qtwist {

/// A caller violated an operation's precondition (bad argument shape or value).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A table (sieve, tau table) does not reach far enough for the request.
class RangeError : public std::out_of_range {
public:
    RangeError(const std::string& what, std::uint64_t required = 0)
        : std::out_of_range(what), required_(required) {}

    /// Smallest table limit that would satisfy the request, 0 when unknown.
    std::uint64_t required() const noexcept { return required_; }

private:
    std::uint64_t required_;
};

/// A numerical procedure could not certify its stated accuracy.
class AccuracyError : public std::runtime_error {
public:
    AccuracyError(const std::string& what, double achieved)
        : std::runtime_error(what), achieved_(achieved) {}

    double achieved() const noexcept { return achieved_; }

private:
    double achieved_;
};

/// An on-disk cache is missing, unreadable or fails validation.
class CacheError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qtwist
