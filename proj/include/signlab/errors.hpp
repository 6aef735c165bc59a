#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace signlab {

// Base of every library error. The CLI maps all of these to exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation (n = 0, limit < 2, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// A required hypothesis does not hold for the given input.
class HypothesisError : public Error {
public:
    using Error::Error;
};

// A value left the supported machine range (e.g. factorization beyond 64 bits).
class RangeError : public Error {
public:
    using Error::Error;
};

// A congruence system could not be assembled or solved.
class ConstructionError : public Error {
public:
    using Error::Error;
};

// A bounded search ran out of budget. Carries how far it got.
class BudgetExceeded : public Error {
public:
    struct Progress {
        std::size_t completed = 0;     // finished units (e.g. prime strings)
        std::uint64_t consumed = 0;    // budget units spent
        std::uint64_t last_item = 0;   // last element examined (e.g. last prime)
        double partial_value = 0.0;    // progress in the unfinished unit
    };

    BudgetExceeded(const std::string& what, Progress progress)
        : Error(what), progress_(progress) {}

    const Progress& progress() const noexcept { return progress_; }

private:
    Progress progress_;
};

}  // namespace signlab
