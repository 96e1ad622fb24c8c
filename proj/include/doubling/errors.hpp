#pragma once

#include <stdexcept>
#include <string>

namespace doubling {

// Numeric failures: the computation could not reach its target.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RootBracketFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IterationLimit : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EigensolveFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ContractionStall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Domain / argument errors.
struct DomainExceeded : std::domain_error {
    using std::domain_error::domain_error;
};
struct OutOfRange : std::domain_error {
    using std::domain_error::domain_error;
};
struct OutsideBranches : std::domain_error {
    using std::domain_error::domain_error;
};
struct DepthExceeded : std::domain_error {
    using std::domain_error::domain_error;
};
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Structural failures: an object violates an invariant it promised to hold.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};
struct ConcavityViolation : InvariantViolation {
    using InvariantViolation::InvariantViolation;
};
struct GeometryViolation : InvariantViolation {
    using InvariantViolation::InvariantViolation;
};
struct CombinatoricsMismatch : InvariantViolation {
    using InvariantViolation::InvariantViolation;
};
struct IncidenceMismatch : InvariantViolation {
    using InvariantViolation::InvariantViolation;
};
struct ConeEscape : InvariantViolation {
    using InvariantViolation::InvariantViolation;
};

}  // namespace doubling
