#pragma once

#include <stdexcept>
#include <string>

namespace klab {

// Input outside an operation's contract (bad ranges, validity-bound breaches,
// coprimality preconditions).
class ValidityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A proven inequality or structural identity failed on concrete data.
// Always a bug or a surrogate that is too coarse for the requested scale.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Requested work exceeds a configured size limit.
class BudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace klab
