#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace robplan {

/// Input fails a structural invariant. `field()` names the offending entry,
/// e.g. "upper_probs[0]".
class ValidationError : public std::invalid_argument {
public:
    ValidationError(std::string field, const std::string& message)
        : std::invalid_argument(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Argument outside the set where a function is defined.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The forecasts admit no probability distribution.
class AmbiguitySetEmpty : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The simplex hit its pivot limit or lost accuracy beyond repair.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A refinement oracle returned a bound above the current one.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace robplan
